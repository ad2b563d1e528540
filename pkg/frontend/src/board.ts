// Mission board state as a pure function of the event log prefix.
// Events are applied strictly in seq order; anything that arrives early is
// buffered until the gap closes, so a reconnecting stream can never
// corrupt the board.

import type {
  MissionJson,
  PlanUpdatedPayload,
  ScheduleJson,
  ServiceEvent,
} from "./types";

export interface MissionCard {
  mission: MissionJson;
  lastEventSeq: number;
}

export interface BoardState {
  lastSeq: number;
  clockRate: number | null;
  simTimeH: number;
  missions: Record<string, MissionCard>;
  order: string[]; // mission ids in arrival order
  toasts: string[];
}

export function emptyBoard(): BoardState {
  return {
    lastSeq: 0,
    clockRate: null,
    simTimeH: 0,
    missions: {},
    order: [],
    toasts: [],
  };
}

function applyOne(board: BoardState, event: ServiceEvent): BoardState {
  const next: BoardState = {
    ...board,
    lastSeq: event.seq,
    simTimeH: event.sim_time_h,
    missions: { ...board.missions },
    order: [...board.order],
    toasts: [...board.toasts],
  };
  switch (event.type) {
    case "service.started": {
      const rate = event.payload["clock_rate"];
      next.clockRate = typeof rate === "number" ? rate : null;
      break;
    }
    case "plan.created": {
      const mission = event.payload as unknown as MissionJson;
      const id = mission.request.id;
      next.missions[id] = { mission, lastEventSeq: event.seq };
      next.order.push(id);
      break;
    }
    case "plan.updated": {
      const id = event.mission_id;
      if (!id || !next.missions[id]) break;
      const payload = event.payload as unknown as PlanUpdatedPayload;
      const card = next.missions[id];
      const mission: MissionJson = {
        ...card.mission,
        schedule: payload.new_schedule,
        injected_delays: [
          ...card.mission.injected_delays,
          { cause: payload.cause, minutes: payload.minutes },
        ],
        delay_total_minutes:
          card.mission.delay_total_minutes + payload.minutes,
      };
      next.missions[id] = { mission, lastEventSeq: event.seq };
      next.toasts.push(
        `${id}: +${payload.minutes} min (${payload.cause})`
      );
      break;
    }
    default:
      // unknown event kinds advance the clock but change nothing else
      break;
  }
  return next;
}

export interface EventBuffer {
  board: BoardState;
  pending: Map<number, ServiceEvent>;
}

export function newBuffer(board: BoardState = emptyBoard()): EventBuffer {
  return { board, pending: new Map() };
}

/** Feed one event; applies it plus any buffered successors in seq order.
 *  Duplicates and stale events (seq <= lastSeq) are dropped. */
export function feed(buf: EventBuffer, event: ServiceEvent): EventBuffer {
  if (event.seq <= buf.board.lastSeq) return buf;
  const pending = new Map(buf.pending);
  pending.set(event.seq, event);
  let board = buf.board;
  while (pending.has(board.lastSeq + 1)) {
    const ready = pending.get(board.lastSeq + 1)!;
    pending.delete(ready.seq);
    board = applyOne(board, ready);
  }
  return { board, pending };
}

/** Rebuild a board from a full recorded log. */
export function replay(events: ServiceEvent[]): BoardState {
  let buf = newBuffer();
  for (const e of events) buf = feed(buf, e);
  return buf.board;
}

export function schedule(board: BoardState, id: string): ScheduleJson | null {
  const card = board.missions[id];
  return card ? card.mission.schedule : null;
}
