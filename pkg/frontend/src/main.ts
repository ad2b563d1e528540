// Dispatcher console: request form, mission board with countdowns, delay
// dialog, live map. Single rendering loop over an ordered event queue.

import { ApiClient, ServiceApiError, subscribe } from "./api";
import { BoardState, EventBuffer, feed, newBuffer } from "./board";
import { formatCountdown, formatGap } from "./countdown";
import {
  serverErrorToForm,
  validateDelayForm,
  validateRequestForm,
} from "./form";
import { aircraftLegend, renderMapSvg } from "./map";
import type { StateJson } from "./types";

const api = new ApiClient("");
let buffer: EventBuffer = newBuffer();
let lastState: StateJson | null = null;
let stale = false;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function renderErrors(form: HTMLElement, errors: Record<string, string>) {
  for (const node of form.querySelectorAll(".field-error")) node.remove();
  for (const [field, message] of Object.entries(errors)) {
    const input = form.querySelector(`[name="${field}"]`);
    const note = document.createElement("div");
    note.className = "field-error";
    note.textContent = message;
    (input?.parentElement ?? form).appendChild(note);
  }
}

function banner(text: string | null) {
  const node = el<HTMLDivElement>("banner");
  node.textContent = text ?? "";
  node.hidden = !text;
}

function renderBoard(board: BoardState) {
  const now = Date.now();
  const list = el<HTMLDivElement>("board");
  const cards: string[] = [];
  for (const id of [...board.order].reverse()) {
    const { mission } = board.missions[id];
    const s = mission.schedule;
    const scores = Object.entries(mission.per_action_scores)
      .sort((a, b) => b[1] - a[1])
      .map(
        ([label, score]) =>
          `<div class="score-row${label === mission.chosen_action ? " chosen" : ""}">` +
          `<span>${label}</span><span>${score.toFixed(2)}</span></div>`
      )
      .join("");
    const delays = mission.injected_delays
      .map((d) => `<li>+${d.minutes} min: ${d.cause}</li>`)
      .join("");
    cards.push(`
      <div class="mission" data-id="${id}">
        <h3>${id} &mdash; ${mission.status}</h3>
        <div>action: <b>${mission.chosen_action}</b>,
             predicted T ${mission.predicted_response_minutes.toFixed(1)} min</div>
        <div>forward dispatch ${formatCountdown(s.forward_dispatch, now)}
           | rear dispatch <span class="rear-countdown">${formatCountdown(s.rear_dispatch, now)}</span>
           | handoff gap ${formatGap(s.predicted_handoff_gap_minutes)}</div>
        <div class="scores">${scores}</div>
        ${delays ? `<ul class="delays">${delays}</ul>` : ""}
        <button class="delay-btn" data-id="${id}"
          ${mission.status === "planned" || mission.status === "forward_enroute" ? "" : "disabled title='past handoff'"}>
          inject delay</button>
      </div>`);
  }
  list.innerHTML = cards.join("") || "<p>no missions yet</p>";
  for (const btn of list.querySelectorAll<HTMLButtonElement>(".delay-btn")) {
    btn.onclick = () => openDelayDialog(btn.dataset.id!);
  }
  el<HTMLDivElement>("toasts").innerHTML = board.toasts
    .slice(-5)
    .map((t) => `<div class="toast">${t}</div>`)
    .join("");
}

function renderMap() {
  if (!lastState) return;
  el<HTMLDivElement>("map-holder").innerHTML = renderMapSvg(
    lastState,
    buffer.board
  );
  el<HTMLDivElement>("aircraft").innerHTML = aircraftLegend(lastState);
  el<HTMLDivElement>("stale").hidden = !stale;
}

function openDelayDialog(missionId: string) {
  const dialog = el<HTMLDialogElement>("delay-dialog");
  el<HTMLInputElement>("delay-mission").value = missionId;
  dialog.showModal();
}

async function onSubmitRequest(evt: Event) {
  evt.preventDefault();
  const form = evt.target as HTMLFormElement;
  const data = new FormData(form);
  const fields = {
    id: String(data.get("id") ?? ""),
    origin: String(data.get("origin") ?? ""),
    patients: String(data.get("patients") ?? ""),
    kind: String(data.get("kind") ?? ""),
  };
  const errors = validateRequestForm(fields);
  renderErrors(form, errors);
  if (Object.keys(errors).length) return;
  banner(null);
  try {
    await api.submitRequest({
      id: fields.id,
      origin: fields.origin,
      patients: Number(fields.patients),
      kind: fields.kind || undefined,
    });
    form.reset();
  } catch (err) {
    if (err instanceof ServiceApiError) {
      const { fieldErrors, banner: text } = serverErrorToForm(err.body);
      renderErrors(form, fieldErrors);
      banner(err.body.code === "infeasible" ? "infeasible: no feasible action for this request" : text);
    } else {
      banner("service unreachable");
    }
  }
}

async function onSubmitDelay(evt: Event) {
  evt.preventDefault();
  const form = evt.target as HTMLFormElement;
  const data = new FormData(form);
  const fields = {
    cause: String(data.get("cause") ?? ""),
    minutes: String(data.get("minutes") ?? ""),
  };
  const errors = validateDelayForm(fields);
  renderErrors(form, errors);
  if (Object.keys(errors).length) return;
  try {
    await api.injectDelay(
      String(data.get("mission") ?? ""),
      fields.cause,
      Number(fields.minutes)
    );
    el<HTMLDialogElement>("delay-dialog").close();
  } catch (err) {
    if (err instanceof ServiceApiError) {
      const { fieldErrors, banner: text } = serverErrorToForm(err.body);
      renderErrors(form, fieldErrors);
      if (text) banner(text);
    }
  }
}

async function refreshState() {
  try {
    lastState = await api.getState();
  } catch {
    stale = true;
  }
  renderMap();
}

function start() {
  el<HTMLFormElement>("request-form").onsubmit = onSubmitRequest;
  el<HTMLFormElement>("delay-form").onsubmit = onSubmitDelay;
  subscribe("", () => buffer.board.lastSeq, {
    onEvent: (event) => {
      buffer = feed(buffer, event);
      renderBoard(buffer.board);
      void refreshState();
    },
    onStale: (s) => {
      stale = s;
      renderMap();
    },
  });
  void refreshState();
  window.setInterval(() => renderBoard(buffer.board), 1000);
}

document.addEventListener("DOMContentLoaded", start);
