// Payload shapes mirrored from the dispatch service API. Every field the
// console renders comes from one of these; the client never computes
// times, rewards, or intercepts itself.

export interface RequestJson {
  id: string;
  injury_time: number;
  origin: string;
  patients: number;
  kind: string;
  destination: string;
}

export interface ScheduleJson {
  forward_dispatch: string | null;
  rear_dispatch: string | null;
  handoff_time: string | null;
  delivery_time: string | null;
  predicted_handoff_gap_minutes: number;
}

export interface MissionJson {
  request: RequestJson;
  chosen_action: string;
  per_action_scores: Record<string, number>;
  per_action_visits: Record<string, number>;
  predicted_response_minutes: number;
  schedule: ScheduleJson;
  exchange_point: { x: number; y: number } | null;
  status: string;
  injected_delays: { cause: string; minutes: number }[];
  delay_total_minutes: number;
}

export interface ServiceEvent {
  seq: number;
  type: string;
  sim_time_h: number;
  timestamp: string;
  mission_id?: string;
  mission_seq?: number;
  payload: Record<string, unknown>;
}

export interface PlanUpdatedPayload {
  cause: string;
  minutes: number;
  old_schedule: ScheduleJson;
  new_schedule: ScheduleJson;
}

export interface WatercraftJson {
  id: string;
  x: number;
  y: number;
  vx: number;
  vy: number;
}

export interface AircraftJson {
  platoon: string;
  busy: boolean;
  free_at: string | null;
}

export interface StateJson {
  sim_time_h: number;
  timestamp: string;
  watercraft: WatercraftJson[];
  aircraft: AircraftJson[];
  missions: MissionJson[];
}

export interface ApiError {
  code: string;
  message: string;
  field?: string;
}
