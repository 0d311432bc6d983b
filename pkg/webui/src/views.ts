// Rendering: moves to HTML. Menus are built exclusively from the options
// carried by the move itself - the client never invents choices, and no
// template here contains a free-text input.

import type { Move, QueryMove, ReplyPayload, TranscriptEntry } from "./types.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

const OUTCOME_LABEL: Record<string, string> = {
  accepted: "You accepted the suggestion. Dialogue complete.",
  rejected: "You declined every suggestion. Dialogue complete.",
  failed: "The system has no suggestion it can defend here.",
  "budget-exhausted": "The dialogue reached its length limit.",
};

function describeReply(payload: ReplyPayload): string {
  if ("level" in payload) {
    return payload.level
      .split("-")
      .map((part) => part[0].toUpperCase() + part.slice(1))
      .join(" ");
  }
  if ("accept" in payload) return payload.accept ? "Yes" : "No";
  if ("ids" in payload) return payload.ids.length ? payload.ids.join(", ") : "(none)";
  return `option ${payload.option + 1}`;
}

/** A settled transcript entry as a chat bubble. */
export function renderEntry(entry: TranscriptEntry): string {
  const move = entry.move;
  if (move.type === "user-reply") {
    return `<div class="bubble user" data-step="${entry.step}">${escapeHtml(
      describeReply(move.payload),
    )}</div>`;
  }
  if (move.type === "close") {
    return `<div class="banner outcome-${move.outcome}" data-step="${entry.step}">${escapeHtml(
      OUTCOME_LABEL[move.outcome] ?? move.outcome,
    )}</div>`;
  }
  const prompt = promptFor(move);
  return `<div class="bubble aps" data-step="${entry.step}">${escapeHtml(prompt)}</div>`;
}

function promptFor(move: Exclude<Move, { type: "user-reply" } | { type: "close" }>): string {
  switch (move.type) {
    case "system-posit":
      return move.text;
    case "ask-belief":
      return `How much do you agree? "${move.text}"`;
    case "ask-objection":
      return `Is this a reason for you not to accept the suggestion? "${move.text}"`;
    case "offer-goal":
      return `Will you do it? "${move.text}"`;
    case "ask-fact":
      return move.prompt;
    case "ask-goals":
      return "Which are goals for you?";
  }
}

function optionButtons(step: number, labels: string[], payloads: ReplyPayload[]): string {
  const buttons = labels
    .map(
      (label, i) =>
        `<button type="button" class="option" data-step="${step}" ` +
        `data-payload='${escapeHtml(JSON.stringify(payloads[i]))}'>${escapeHtml(label)}</button>`,
    )
    .join("");
  return `<div class="options">${buttons}</div>`;
}

/** The interactive widget for the pending query. */
export function renderWidget(step: number, move: QueryMove): string {
  switch (move.type) {
    case "ask-belief": {
      // Five-point agreement scale, in the exact order the move carries.
      const levels = ["strongly-agree", "agree", "neither", "disagree", "strongly-disagree"];
      return (
        `<div class="widget likert" data-step="${step}">` +
        optionButtons(step, move.options, levels.map((level) => ({ level }))) +
        `</div>`
      );
    }
    case "ask-objection":
    case "offer-goal": {
      const payloads = move.options.map((label) => ({ accept: label === "Yes" }));
      return (
        `<div class="widget yes-no" data-step="${step}">` +
        optionButtons(step, move.options, payloads) +
        `</div>`
      );
    }
    case "ask-fact": {
      const radios = move.options
        .map(
          (opt, i) =>
            `<label class="choice"><input type="radio" name="fact-${step}" value="${i}">` +
            `${escapeHtml(opt.label)}</label>`,
        )
        .join("");
      return (
        `<div class="widget fact" data-step="${step}">${radios}` +
        `<button type="button" class="confirm" data-step="${step}">Confirm</button></div>`
      );
    }
    case "ask-goals": {
      const boxes = move.options
        .map(
          (opt) =>
            `<label class="choice"><input type="checkbox" value="${escapeHtml(opt.id)}">` +
            `${escapeHtml(opt.text)}</label>`,
        )
        .join("");
      // An empty selection is a legal answer, so Confirm is always enabled.
      return (
        `<div class="widget goals" data-step="${step}">${boxes}` +
        `<button type="button" class="confirm" data-step="${step}">Confirm</button></div>`
      );
    }
  }
}

/** Read the reply payload out of a fact/goals widget's current selection. */
export function widgetSelection(widget: Element): ReplyPayload | null {
  if (widget.classList.contains("fact")) {
    const chosen = widget.querySelector<HTMLInputElement>("input[type=radio]:checked");
    return chosen ? { option: Number(chosen.value) } : null;
  }
  if (widget.classList.contains("goals")) {
    const ids = [...widget.querySelectorAll<HTMLInputElement>("input[type=checkbox]:checked")]
      .map((box) => box.value)
      .sort();
    return { ids };
  }
  return null;
}

export function renderErrorBanner(message: string): string {
  return (
    `<div class="banner error">${escapeHtml(message)} ` +
    `<button type="button" class="retry">Retry</button></div>`
  );
}
