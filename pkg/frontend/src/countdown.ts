// Countdown formatting. Inputs are ISO timestamps straight from service
// payloads plus the wall clock; no mission timing is computed here.

export function minutesUntil(iso: string | null, nowMs: number): number | null {
  if (iso === null) return null;
  const target = Date.parse(iso);
  if (Number.isNaN(target)) return null;
  return (target - nowMs) / 60000;
}

export function formatCountdown(iso: string | null, nowMs: number): string {
  const minutes = minutesUntil(iso, nowMs);
  if (minutes === null) return "--";
  if (minutes <= 0) return "now";
  const whole = Math.floor(minutes);
  const secs = Math.round((minutes - whole) * 60);
  return `T-${whole}m${String(secs).padStart(2, "0")}s`;
}

export function formatGap(minutes: number): string {
  return `${minutes.toFixed(1)} min`;
}
