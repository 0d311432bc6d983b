// Wire types mirroring the service's move JSON exactly.

export interface SystemPositMove {
  type: "system-posit";
  id: string;
  text: string;
}

export interface AskBeliefMove {
  type: "ask-belief";
  id: string;
  text: string;
  options: string[];
}

export interface FactOption {
  label: string;
  atom: string;
}

export interface AskFactMove {
  type: "ask-fact";
  query_id: string;
  prompt: string;
  options: FactOption[];
}

export interface GoalOption {
  id: string;
  text: string;
}

export interface AskGoalsMove {
  type: "ask-goals";
  options: GoalOption[];
}

export interface AskObjectionMove {
  type: "ask-objection";
  id: string;
  text: string;
  options: string[];
}

export interface OfferGoalMove {
  type: "offer-goal";
  id: string;
  text: string;
  options: string[];
}

export interface CloseMove {
  type: "close";
  outcome: "accepted" | "rejected" | "failed" | "budget-exhausted";
}

export type ReplyPayload =
  | { level: string }
  | { option: number }
  | { ids: string[] }
  | { accept: boolean };

export interface UserReplyMove {
  type: "user-reply";
  payload: ReplyPayload;
}

export type Move =
  | SystemPositMove
  | AskBeliefMove
  | AskFactMove
  | AskGoalsMove
  | AskObjectionMove
  | OfferGoalMove
  | CloseMove
  | UserReplyMove;

export type QueryMove =
  | AskBeliefMove
  | AskFactMove
  | AskGoalsMove
  | AskObjectionMove
  | OfferGoalMove;

export interface TranscriptEntry {
  step: number;
  actor: "APS" | "User";
  move: Move;
}

export interface NextMove {
  step: number;
  move: Move;
}

export interface CorpusEntry {
  name: string;
  goal_count: number;
  argument_count: number;
  arc_count: number;
  user_goals: GoalOption[];
  atoms: string[];
  topics: string[];
}

export interface IntakeForm {
  facts: string[];
  interests: string[];
  declared_goals: string[];
  beliefs?: Record<string, { value: number; confidence: number }>;
}

export function isQuery(move: Move): move is QueryMove {
  return (
    move.type === "ask-belief" ||
    move.type === "ask-fact" ||
    move.type === "ask-goals" ||
    move.type === "ask-objection" ||
    move.type === "offer-goal"
  );
}
