/**
 * Annotation SPA: blind side-by-side comparison of two candidate detection
 * rules for one context. Candidates arrive anonymized and pre-shuffled by
 * the backend; this page never learns which method wrote which text.
 *
 * Keys: 1 = prefer first, 2 = prefer second, t = tie.
 */

import {
  ApiError,
  fetchAgreement,
  fetchNextTask,
  submitLabel,
} from "./api.js";
import type { PositionalLabel, Task } from "./types.js";

interface PendingLabel {
  taskId: string;
  label: PositionalLabel;
}

let annotator = "";
let current: Task | null = null;
let pending: PendingLabel | null = null; // held across failed submissions
let busy = false;

function el<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (!found) {
    throw new Error(`missing element #${id}`);
  }
  return found as T;
}

function show(id: string, visible: boolean): void {
  el(id).hidden = !visible;
}

function setNote(text: string): void {
  const note = el("note");
  note.textContent = text;
  note.hidden = text === "";
}

function renderTask(task: Task, labeled: number, total: number): void {
  current = task;
  el("task-screen").dataset.taskId = task.task_id;
  el("context-text").textContent = task.context;
  el("candidate-1").textContent = task.candidate_1;
  el("candidate-2").textContent = task.candidate_2;
  el("progress-label").textContent = `${labeled} / ${total} labeled`;
  show("task-screen", true);
  show("done-screen", false);
}

async function renderDone(labeled: number, total: number): Promise<void> {
  current = null;
  el("progress-label").textContent = `${labeled} / ${total} labeled`;
  show("task-screen", false);
  show("done-screen", true);
  el("done-summary").textContent =
    `You labeled ${labeled} of ${total} comparisons.`;
  try {
    const agreement = await fetchAgreement();
    const mine = agreement.vs_judge[annotator];
    const lines: string[] = [];
    if (mine) {
      lines.push(
        `Agreement with the automated judge: kappa ${mine.kappa.toFixed(3)} ` +
          `(raw ${(mine.agreement * 100).toFixed(1)}%, n=${mine.n})`,
      );
    }
    for (const [pair, stats] of Object.entries(agreement.between_annotators)) {
      lines.push(`${pair}: kappa ${stats.kappa.toFixed(3)} (n=${stats.n})`);
    }
    el("agreement-summary").textContent = lines.join("\n");
  } catch {
    el("agreement-summary").textContent = "(agreement summary unavailable)";
  }
}

async function advance(): Promise<void> {
  const next = await fetchNextTask(annotator);
  if (next.task) {
    renderTask(next.task, next.labeled, next.total);
  } else {
    await renderDone(next.labeled, next.total);
  }
}

// Submission is two-phase: `choose` parks the label in `pending`, then
// `flushPending` posts it. A network failure keeps `pending` and shows the
// retry banner, so the click/keystroke is never lost.
async function flushPending(): Promise<void> {
  if (!pending || busy) {
    return;
  }
  busy = true;
  show("retry-banner", false);
  try {
    const status = await submitLabel(pending.taskId, annotator, pending.label);
    setNote(
      status === 409 ? "Already labeled on another device; not counted again." : "",
    );
    pending = null;
    await advance();
  } catch (err) {
    if (err instanceof ApiError) {
      // a malformed request will not get better by retrying
      setNote(`Submission rejected (${err.status}): ${err.message}`);
      pending = null;
    } else {
      el("retry-message").textContent =
        `Could not reach the server; your "${pendingLabelText()}" choice is saved locally.`;
      show("retry-banner", true);
    }
  } finally {
    busy = false;
  }
}

function pendingLabelText(): string {
  return pending ? pending.label : "";
}

function choose(label: PositionalLabel): void {
  if (!current || busy || pending) {
    return;
  }
  pending = { taskId: current.task_id, label };
  void flushPending();
}

function onKeydown(event: KeyboardEvent): void {
  const target = event.target;
  if (
    target instanceof HTMLInputElement ||
    target instanceof HTMLTextAreaElement
  ) {
    return; // typing an annotator name, not labeling
  }
  switch (event.key) {
    case "1":
      event.preventDefault();
      choose("first");
      break;
    case "2":
      event.preventDefault();
      choose("second");
      break;
    case "t":
    case "T":
      event.preventDefault();
      choose("tie");
      break;
  }
}

async function startSession(): Promise<void> {
  const name = el<HTMLInputElement>("annotator-input").value.trim();
  if (!name) {
    setNote("Enter an annotator id first.");
    return;
  }
  annotator = name;
  setNote("");
  show("annotator-form", false);
  await advance();
}

export function initApp(): void {
  annotator = "";
  current = null;
  pending = null;
  busy = false;

  el("start-btn").addEventListener("click", () => void startSession());
  el<HTMLInputElement>("annotator-input").addEventListener(
    "keydown",
    (event) => {
      if (event.key === "Enter") {
        void startSession();
      }
    },
  );
  el("pick-first").addEventListener("click", () => choose("first"));
  el("pick-second").addEventListener("click", () => choose("second"));
  el("pick-tie").addEventListener("click", () => choose("tie"));
  el("retry-btn").addEventListener("click", () => void flushPending());

  document.removeEventListener("keydown", onKeydown); // re-init safety
  document.addEventListener("keydown", onKeydown);

  // ?annotator=name skips the form (handy for handing out per-person links)
  const preset = new URLSearchParams(window.location.search).get("annotator");
  if (preset) {
    el<HTMLInputElement>("annotator-input").value = preset;
    void startSession();
  } else {
    show("annotator-form", true);
  }
}

// Module scripts run after parsing, so the elements exist; the guard keeps
// a bare import (as in tests) from touching an empty document.
if (document.readyState === "loading") {
  document.addEventListener("DOMContentLoaded", () => initApp());
} else if (document.getElementById("task-screen")) {
  initApp();
}
