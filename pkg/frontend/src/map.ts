// SVG map built purely from service payloads: watercraft positions and
// velocities, mission exchange points, aircraft busy flags. Coordinates
// are the scenario's planar nautical-mile frame projected linearly.

import type { BoardState } from "./board";
import type { StateJson } from "./types";

export interface ViewBox {
  minX: number;
  minY: number;
  width: number;
  height: number;
}

export function fitViewBox(state: StateJson, pad = 15): ViewBox {
  const xs: number[] = [];
  const ys: number[] = [];
  for (const c of state.watercraft) {
    xs.push(c.x);
    ys.push(c.y);
  }
  for (const m of state.missions) {
    if (m.exchange_point) {
      xs.push(m.exchange_point.x);
      ys.push(m.exchange_point.y);
    }
  }
  if (!xs.length) {
    xs.push(0);
    ys.push(0);
  }
  const minX = Math.min(...xs) - pad;
  const maxX = Math.max(...xs) + pad;
  const minY = Math.min(...ys) - pad;
  const maxY = Math.max(...ys) + pad;
  return { minX, minY, width: maxX - minX, height: maxY - minY };
}

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function renderMapSvg(state: StateJson, board: BoardState): string {
  const vb = fitViewBox(state);
  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="${vb.minX} ${vb.minY} ${vb.width} ${vb.height}" class="map">`
  );
  // y grows north in the scenario frame; flip for screen space
  parts.push(`<g transform="scale(1,-1)">`);
  for (const craft of state.watercraft) {
    parts.push(
      `<circle cx="${craft.x}" cy="${craft.y}" r="1.6" class="watercraft" data-id="${esc(craft.id)}"/>`
    );
    // velocity tick so heading is visible without client-side integration
    parts.push(
      `<line x1="${craft.x}" y1="${craft.y}" x2="${craft.x + craft.vx}" y2="${craft.y + craft.vy}" class="heading"/>`
    );
    parts.push(
      `<text x="${craft.x + 2}" y="${craft.y}" transform="scale(1,-1)" class="label">${esc(craft.id)}</text>`
    );
  }
  for (const id of board.order) {
    const mission = board.missions[id].mission;
    const xp = mission.exchange_point;
    if (!xp) continue;
    parts.push(
      `<rect x="${xp.x - 1}" y="${xp.y - 1}" width="2" height="2" class="exchange" data-mission="${esc(id)}"/>`
    );
  }
  parts.push(`</g>`);
  parts.push(`</svg>`);
  return parts.join("");
}

export function aircraftLegend(state: StateJson): string {
  return state.aircraft
    .map(
      (a) =>
        `<span class="aircraft ${a.busy ? "busy" : "free"}">${esc(a.platoon)}: ${
          a.busy ? `busy until ${esc(a.free_at ?? "?")}` : "ready"
        }</span>`
    )
    .join(" ");
}
