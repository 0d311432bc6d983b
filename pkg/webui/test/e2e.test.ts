// End-to-end: the UI drives a real service through the strategy-walkthrough
// dialogue by clicking menu options; the resulting server-side transcript
// must equal the CLI simulator's golden transcript.

import { spawn, type ChildProcess } from "node:child_process";
import { createServer } from "node:net";
import { readFileSync } from "node:fs";
import path from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { App } from "../src/app.js";
import type { TranscriptEntry } from "../src/types.js";

const REPO_ROOT = path.resolve(__dirname, "..", "..");
const GOLDEN_PATH = path.join(REPO_ROOT, "tests", "data", "golden_office_walkthrough.jsonl");
const PERSONA_PATH = path.join(REPO_ROOT, "tests", "data", "personas", "office_walkthrough.json");

const golden: TranscriptEntry[] = readFileSync(GOLDEN_PATH, "utf-8")
  .trim()
  .split("\n")
  .map((line) => JSON.parse(line));
const persona = JSON.parse(readFileSync(PERSONA_PATH, "utf-8"));

let proc: ChildProcess;
let baseUrl: string;

function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const srv = createServer();
    srv.listen(0, "127.0.0.1", () => {
      const address = srv.address();
      if (address === null || typeof address === "string") {
        reject(new Error("no port"));
        return;
      }
      srv.close(() => resolve(address.port));
    });
  });
}

async function waitUntilUp(url: string, timeoutMs = 15000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    try {
      await fetch(`${url}/api/v1/corpus`);
      return;
    } catch {
      await new Promise((r) => setTimeout(r, 100));
    }
  }
  throw new Error("service did not come up");
}

beforeAll(async () => {
  const port = await freePort();
  baseUrl = `http://127.0.0.1:${port}`;
  proc = spawn(
    "python3",
    ["-m", "persuade.cli", "serve", "--port", String(port), "--data-dir",
     path.join(REPO_ROOT, "webui", "node_modules", ".e2e-data")],
    { cwd: REPO_ROOT, stdio: "ignore" },
  );
  await waitUntilUp(baseUrl);
});

afterAll(() => {
  proc?.kill("SIGTERM");
});

function waitForIdle(root: HTMLElement): Promise<void> {
  return new Promise((resolve) =>
    root.addEventListener("persuade:idle", () => resolve(), { once: true }),
  );
}

async function clickAndSettle(root: HTMLElement, button: HTMLButtonElement): Promise<void> {
  const settled = waitForIdle(root);
  button.click();
  await settled;
}

describe("walkthrough dialogue via the UI", () => {
  it("completes the persona path and matches the golden transcript", async () => {
    const api = new ApiClient(baseUrl);
    const sessionId = await api.createSession("office-wellbeing", {
      facts: [],
      interests: [],
      declared_goals: ["c4"],
      beliefs: persona.beliefs,
    });

    const root = document.createElement("div");
    document.body.appendChild(root);
    window.location.hash = `#/session/${sessionId}`;

    const app = new App(root, baseUrl);
    const firstIdle = waitForIdle(root);
    void app.start();
    await firstIdle;

    let sawLikertOrder = false;
    for (let guard = 0; guard < 40; guard++) {
      const widget = root.querySelector(".widget");
      if (widget === null) break; // close banner reached

      const options = [...widget.querySelectorAll<HTMLButtonElement>("button.option")];
      if (widget.classList.contains("likert")) {
        expect(options.map((b) => b.textContent)).toEqual([
          "Strongly agree",
          "Agree",
          "Neither agree nor disagree",
          "Disagree",
          "Strongly disagree",
        ]);
        sawLikertOrder = true;
      }

      // Answer with the walkthrough persona's scripted reply.
      const asked = root.querySelector(".widget")!;
      const step = Number(asked.querySelector<HTMLElement>("button")!.dataset.step);
      const transcript = await api.transcript(sessionId);
      const move = transcript[step - 1].move;
      const id = "id" in move ? move.id : undefined;
      const scripted = persona.replies[id!];
      let label: string;
      if (scripted === "yes" || scripted === "no") {
        label = scripted === "yes" ? "Yes" : "No";
      } else {
        label = { agree: "Agree", disagree: "Disagree" }[scripted as string]!;
      }
      const button = options.find((b) => b.textContent === label)!;
      await clickAndSettle(root, button);
    }

    expect(sawLikertOrder).toBe(true);
    expect(root.querySelector(".banner.outcome-accepted")).not.toBeNull();

    const transcript = await api.transcript(sessionId);
    expect(transcript).toEqual(golden);

    // Stateless reload: a fresh mount of the same session shows the same log.
    const root2 = document.createElement("div");
    document.body.appendChild(root2);
    const app2 = new App(root2, baseUrl);
    const idle2 = waitForIdle(root2);
    void app2.start();
    await idle2;
    expect(root2.querySelectorAll(".bubble, .banner").length).toBe(
      root.querySelectorAll(".bubble, .banner").length,
    );
  }, 60000);

  it("starting a session from the intake form posits first", async () => {
    window.location.hash = "";
    const root = document.createElement("div");
    document.body.appendChild(root);
    const app = new App(root, baseUrl);
    const idle = waitForIdle(root);
    void app.start();
    await idle;

    const start = root.querySelector<HTMLButtonElement>("button.start")!;
    expect(start.disabled).toBe(true); // nothing selected yet

    const select = root.querySelector<HTMLSelectElement>("select[name=entry]")!;
    select.value = "office-wellbeing";
    select.dispatchEvent(new Event("change", { bubbles: true }));
    expect(start.disabled).toBe(false);

    const friendBox = [...root.querySelectorAll<HTMLInputElement>(".intake-goals input")].find(
      (box) => box.value === "c4",
    )!;
    friendBox.checked = true;

    const settled = waitForIdle(root);
    root.querySelector("form")!.dispatchEvent(new Event("submit", { bubbles: true, cancelable: true }));
    await settled;

    const firstBubble = root.querySelector(".bubble.aps");
    expect(firstBubble).not.toBeNull();
    expect(firstBubble!.textContent!.length).toBeGreaterThan(0);
  }, 60000);
});
