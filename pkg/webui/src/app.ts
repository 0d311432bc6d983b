// Controller: intake form, chat loop, reply submission.
//
// The UI keeps no state beyond the session id in the URL hash: reloading
// replays GET transcript + GET next and lands on the identical view. One
// request is in flight per view at a time; widgets are disabled while a
// submit is pending, and double-clicks are additionally safe because the
// service deduplicates by (session, step).

import { ApiClient, ApiError } from "./api.js";
import type { CorpusEntry, Move, NextMove, ReplyPayload, TranscriptEntry } from "./types.js";
import { isQuery } from "./types.js";
import { renderEntry, renderErrorBanner, renderWidget, widgetSelection } from "./views.js";

const IDLE_EVENT = "persuade:idle";

export class App {
  private readonly api: ApiClient;
  private sessionId: string | null = null;
  private busy = false;
  private entries: CorpusEntry[] = [];

  constructor(
    private readonly root: HTMLElement,
    apiBase: string = "",
  ) {
    this.api = new ApiClient(apiBase);
    this.root.addEventListener("click", (event) => this.onClick(event));
  }

  /** Route from the current hash: intake form or an existing session. */
  async start(): Promise<void> {
    const hash = window.location.hash;
    const match = /^#\/session\/([0-9a-f]+)$/.exec(hash);
    if (match) {
      this.sessionId = match[1];
      await this.resume();
    } else {
      await this.showIntake();
    }
  }

  private idle(): void {
    this.root.dispatchEvent(new CustomEvent(IDLE_EVENT));
  }

  // -- intake --------------------------------------------------------------

  private async showIntake(): Promise<void> {
    try {
      this.entries = (await this.api.corpus()).entries;
    } catch (err) {
      this.root.innerHTML = renderErrorBanner(this.describe(err));
      this.idle();
      return;
    }
    const options = this.entries
      .map(
        (e) =>
          `<option value="${e.name}">${e.name} (${e.goal_count} goals, ` +
          `${e.argument_count} arguments)</option>`,
      )
      .join("");
    this.root.innerHTML = `
      <form class="intake">
        <h1>Start a dialogue</h1>
        <label>Campaign
          <select name="entry" required>
            <option value="" selected disabled>Choose a campaign</option>
            ${options}
          </select>
        </label>
        <fieldset class="intake-goals"><legend>Which are goals for you?</legend></fieldset>
        <fieldset class="intake-facts"><legend>Which of these apply to you?</legend></fieldset>
        <fieldset class="intake-interests"><legend>Topics you care about</legend></fieldset>
        <button type="submit" class="start" disabled>Start</button>
      </form>`;
    const form = this.root.querySelector("form")!;
    const select = form.querySelector<HTMLSelectElement>("select[name=entry]")!;
    select.addEventListener("change", () => this.fillIntakeLists(form, select.value));
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.submitIntake(form);
    });
    this.idle();
  }

  private fillIntakeLists(form: HTMLFormElement, entryName: string): void {
    const entry = this.entries.find((e) => e.name === entryName);
    if (!entry) return;
    const checkboxes = (items: { value: string; label: string }[]) =>
      items
        .map(
          (item) =>
            `<label class="choice"><input type="checkbox" value="${item.value}">` +
            `${item.label}</label>`,
        )
        .join("");
    form.querySelector(".intake-goals")!.innerHTML =
      "<legend>Which are goals for you?</legend>" +
      checkboxes(entry.user_goals.map((g) => ({ value: g.id, label: g.text })));
    form.querySelector(".intake-facts")!.innerHTML =
      "<legend>Which of these apply to you?</legend>" +
      checkboxes(entry.atoms.map((a) => ({ value: a, label: a })));
    form.querySelector(".intake-interests")!.innerHTML =
      "<legend>Topics you care about</legend>" +
      checkboxes(entry.topics.map((t) => ({ value: t, label: t })));
    form.querySelector<HTMLButtonElement>("button.start")!.disabled = false;
  }

  private async submitIntake(form: HTMLFormElement): Promise<void> {
    const entry = form.querySelector<HTMLSelectElement>("select[name=entry]")!.value;
    const picked = (selector: string) =>
      [...form.querySelectorAll<HTMLInputElement>(`${selector} input:checked`)].map(
        (box) => box.value,
      );
    try {
      this.sessionId = await this.api.createSession(entry, {
        facts: picked(".intake-facts"),
        interests: picked(".intake-interests"),
        declared_goals: picked(".intake-goals"),
      });
    } catch (err) {
      form.insertAdjacentHTML("beforeend", renderErrorBanner(this.describe(err)));
      this.idle();
      return;
    }
    window.location.hash = `#/session/${this.sessionId}`;
    await this.resume();
  }

  // -- chat loop -------------------------------------------------------------

  private chatShell(): HTMLElement {
    this.root.innerHTML = `
      <div class="chat">
        <div class="log"></div>
        <div class="widget-slot"></div>
      </div>`;
    return this.root.querySelector(".log")!;
  }

  private appendEntry(entry: TranscriptEntry): void {
    this.root.querySelector(".log")!.insertAdjacentHTML("beforeend", renderEntry(entry));
  }

  private showWidget(step: number, move: Move): void {
    const slot = this.root.querySelector(".widget-slot")!;
    slot.innerHTML = isQuery(move) ? renderWidget(step, move) : "";
  }

  private async resume(): Promise<void> {
    this.chatShell();
    try {
      const transcript = await this.api.transcript(this.sessionId!);
      for (const entry of transcript) this.appendEntry(entry);
      const last = transcript[transcript.length - 1];
      if (last && isQuery(last.move) && transcript.every(
        (e) => !(e.actor === "User" && e.step > last.step),
      )) {
        // Pending query restored from the log.
        this.showWidget(last.step, last.move);
        this.idle();
        return;
      }
      if (last && last.move.type === "close") {
        this.idle();
        return;
      }
      await this.advance();
    } catch (err) {
      this.showError(err);
    }
  }

  /** Pull system moves until a query or a close appears. */
  private async advance(): Promise<void> {
    try {
      for (;;) {
        const next: NextMove | null = await this.api.next(this.sessionId!);
        if (next === null) break;
        this.appendEntry({ step: next.step, actor: "APS", move: next.move });
        if (isQuery(next.move)) {
          this.showWidget(next.step, next.move);
          break;
        }
        if (next.move.type === "close") break;
      }
    } catch (err) {
      this.showError(err);
      return;
    }
    this.idle();
  }

  private async submitReply(step: number, payload: ReplyPayload): Promise<void> {
    if (this.busy) return;
    this.busy = true;
    const slot = this.root.querySelector(".widget-slot")!;
    slot.querySelectorAll("button, input").forEach((el) => {
      (el as HTMLButtonElement | HTMLInputElement).disabled = true;
    });
    let ack: { terminal: boolean; outcome?: string };
    try {
      ack = await this.api.reply(this.sessionId!, step, payload);
    } catch (err) {
      if (err instanceof ApiError && err.status === 422) {
        slot.insertAdjacentHTML("beforeend", renderErrorBanner(err.message));
        slot.querySelectorAll("button, input").forEach((el) => {
          (el as HTMLButtonElement | HTMLInputElement).disabled = false;
        });
        this.busy = false;
        this.idle();
        return;
      }
      this.busy = false;
      this.showError(err);
      return;
    }
    this.busy = false;
    this.appendEntry({ step: step + 1, actor: "User", move: { type: "user-reply", payload } });
    slot.innerHTML = "";
    if (ack.terminal) {
      // The closing move was appended server-side while applying the reply.
      this.appendEntry({
        step: step + 2,
        actor: "APS",
        move: { type: "close", outcome: ack.outcome as never },
      });
      this.idle();
      return;
    }
    await this.advance();
  }

  // -- events ----------------------------------------------------------------

  private onClick(event: Event): void {
    const target = event.target as HTMLElement;
    if (target.matches("button.option")) {
      const step = Number(target.dataset.step);
      const payload = JSON.parse(target.dataset.payload!) as ReplyPayload;
      void this.submitReply(step, payload);
    } else if (target.matches("button.confirm")) {
      const widget = target.closest(".widget")!;
      const payload = widgetSelection(widget);
      if (payload !== null) {
        void this.submitReply(Number(target.dataset.step), payload);
      }
    } else if (target.matches("button.retry")) {
      void this.start();
    }
  }

  private describe(err: unknown): string {
    if (err instanceof ApiError) return `${err.code}: ${err.message}`;
    return err instanceof Error ? err.message : String(err);
  }

  private showError(err: unknown): void {
    this.root
      .querySelector(".widget-slot, .chat")
      ?.insertAdjacentHTML("beforeend", renderErrorBanner(this.describe(err)));
    this.idle();
  }
}

export function mount(root: HTMLElement, apiBase = ""): App {
  const app = new App(root, apiBase);
  void app.start();
  return app;
}
