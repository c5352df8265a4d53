/** Shapes of the JSON documents the normalization service serves. */

export interface ChoiceOffer {
  i: number;
  ram: string;
}

/** The visited-occurrence report of a token walk over a closed cut. */
export interface TokenSection {
  outcome: string;
  "visited-principal": string[];
  "visited-partner": string[];
  "pullback-principal": string;
  "pullback-partner": string;
}

export interface SessionDocument {
  command: "explore";
  id?: string;
  alphabet: string[];
  chronicle: string;
  depth: number | null;
  designs: {
    principal: string;
    partners: string[];
  };
  ended: boolean;
  focus: string | null;
  history: ChoiceOffer[];
  offered: ChoiceOffer[];
  outcome: string;
  pullback: TokenSection | null;
  q: string[];
  ramification: string | null;
  steps: number;
}

export interface OrthogonalDocument {
  command: "orthogonal";
  accepted: boolean;
  token: TokenSection | null;
}

export interface NormalizeDocument {
  command: "normalize";
  mode: "weak" | "strong";
  alphabet?: string[];
  depth?: number | null;
  chronicles?: string[];
  design?: string;
  outcome?: string;
  steps?: number;
}

export interface ErrorDocument {
  error: string;
}

export interface ConflictDocument {
  error: "illegal choice";
  offered: ChoiceOffer[];
}

export function isErrorDocument(doc: unknown): doc is ErrorDocument {
  return typeof doc === "object" && doc !== null && "error" in doc;
}

export function isSessionDocument(doc: unknown): doc is SessionDocument {
  return (
    typeof doc === "object" &&
    doc !== null &&
    (doc as { command?: string }).command === "explore"
  );
}
