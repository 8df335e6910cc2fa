// Shared test plumbing: page loading and condition polling.

import { readFileSync } from "node:fs";
import path from "node:path";
import { fileURLToPath } from "node:url";

const here = path.dirname(fileURLToPath(import.meta.url));

export const DIST = path.join(here, "..", "dist");

// Load the built page into jsdom. Strips the doctype and outer <html> so the
// markup can be injected into the environment's existing document.
export function loadPage(): void {
  const html = readFileSync(path.join(DIST, "index.html"), "utf-8");
  const body = html.replace(/^[\s\S]*?<body>/, "").replace(/<\/body>[\s\S]*$/, "");
  document.body.innerHTML = body;
}

export async function waitFor(
  condition: () => boolean,
  timeoutMs = 10_000,
): Promise<void> {
  const start = Date.now();
  while (!condition()) {
    if (Date.now() - start > timeoutMs) {
      throw new Error("timed out waiting for condition");
    }
    await new Promise((resolve) => setTimeout(resolve, 20));
  }
}

export function pressKey(key: string): void {
  document.dispatchEvent(new KeyboardEvent("keydown", { key, bubbles: true }));
}

export function currentTaskId(): string {
  return document.getElementById("task-screen")?.dataset.taskId ?? "";
}

export function visible(id: string): boolean {
  const element = document.getElementById(id);
  return element !== null && !element.hidden;
}
