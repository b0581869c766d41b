// The screen state is a pure fold of the server's event log: every field
// here is derived from events, so replaying a persisted log reconstructs
// exactly what the participant saw. Local affordances that must never
// leak into study data (the rationale dialog, staged slider values) live
// in the store wrapper, not in ViewState.

import { Client, SessionEvent } from "./api.js";

export type Mode = "rem" | "saem" | "aem";
export type Rationale = "form" | "performance" | "both";

export interface GalleryDesign {
  id: string;
  cw: number | null;
  feasible: boolean;
}

export interface Selection {
  id: string;
  rationale: Rationale;
  cw: number | null;
}

export interface ViewState {
  mode: Mode | null;
  eventCount: number;
  terminated: boolean;
  interactionCount: number;
  // random mode
  currentDesignId: string | null;
  evaluatedCw: Record<string, number>;
  slots: Record<number, { designId: string; rationale: Rationale }>;
  // gallery modes
  gallery: GalleryDesign[];
  bounds: { lower: number[]; upper: number[] } | null;
  governing: [number, number] | null;
  weightHistory: [number, number, number][];
  selections: Selection[];
}

export function initialState(): ViewState {
  return {
    mode: null,
    eventCount: 0,
    terminated: false,
    interactionCount: 0,
    currentDesignId: null,
    evaluatedCw: {},
    slots: {},
    gallery: [],
    bounds: null,
    governing: null,
    weightHistory: [],
    selections: [],
  };
}

export function applyEvent(state: ViewState, event: SessionEvent): ViewState {
  const next: ViewState = {
    ...state,
    evaluatedCw: { ...state.evaluatedCw },
    slots: { ...state.slots },
    gallery: [...state.gallery],
    weightHistory: [...state.weightHistory],
    selections: [...state.selections],
    eventCount: state.eventCount + 1,
  };
  const p = event.payload as Record<string, any>;
  switch (event.kind) {
    case "sessionStarted":
      next.mode = p.mode as Mode;
      if (p.governing) next.governing = [p.governing[0], p.governing[1]];
      break;
    case "viewed":
      next.currentDesignId = p.designId as string;
      break;
    case "evaluated":
      next.evaluatedCw[p.designId as string] = p.cw as number;
      break;
    case "generationShown":
      next.gallery = (p.designs as any[]).map((d) => ({
        id: d.id as string,
        cw: (d.cw ?? null) as number | null,
        feasible: (d.feasible ?? true) as boolean,
      }));
      break;
    case "selected":
      if (next.mode === "rem") {
        next.slots[p.slot as number] = {
          designId: p.designId as string,
          rationale: p.rationale as Rationale,
        };
      }
      next.selections.push({
        id: (p.designId ?? p.chosenId) as string,
        rationale: p.rationale as Rationale,
        cw: (p.cw ?? null) as number | null,
      });
      break;
    case "boundsShrunk":
      next.bounds = { lower: p.lower as number[], upper: p.upper as number[] };
      next.interactionCount += 1;
      break;
    case "weightsChanged":
      next.weightHistory.push([
        p.interaction as number,
        (p.governing as number[])[0],
        (p.governing as number[])[1],
      ]);
      next.governing = [(p.next as number[])[0], (p.next as number[])[1]];
      next.interactionCount += 1;
      break;
    case "terminated":
      next.terminated = true;
      break;
  }
  return next;
}

export function foldEvents(events: SessionEvent[]): ViewState {
  return events.reduce(applyEvent, initialState());
}

// -- pure view helpers -------------------------------------------------------

/** Performance value the screen may show for a design; never anything the
 * server has not attached. In the random mode that means only values the
 * participant explicitly asked for. */
export function displayCw(state: ViewState, designId: string): number | null {
  if (state.mode === "rem") {
    return state.evaluatedCw[designId] ?? null;
  }
  const design = state.gallery.find((d) => d.id === designId);
  return design ? design.cw : null;
}

/** Four significant figures, or a placeholder while unevaluated. */
export function formatCw(cw: number | null): string {
  return cw === null ? "—" : cw.toPrecision(4);
}

export function slotCount(state: ViewState): number {
  return Object.keys(state.slots).length;
}

export function canTerminate(state: ViewState, minInteractions = 16,
                             requiredSlots = 5): boolean {
  if (state.terminated) return false;
  if (state.mode === "rem") return slotCount(state) >= requiredSlots;
  return state.interactionCount >= minInteractions;
}

/** The closeness slider is locked to zero until a first pick exists. */
export function slidersLocked(state: ViewState): boolean {
  return state.mode === "aem" && state.interactionCount === 0;
}

// -- the interactive store ----------------------------------------------------

export class DialogOpenError extends Error {
  constructor() {
    super("rationale dialog is open; confirm or cancel the selection first");
  }
}

/** Wraps the pure state with the action API and the rationale-dialog gate:
 * after picking a design, nothing else can happen until a rationale is
 * supplied (or the pick is cancelled). */
export class SessionStore {
  state: ViewState = initialState();
  dialog: { designId: string; slot?: number } | null = null;
  private stagedWeights: { performance: number; closeness: number } | null = null;

  constructor(private client: Client, readonly sessionId: string) {}

  /** Pull any events appended since the last sync and fold them in. */
  async sync(): Promise<void> {
    const batch = await this.client.events(this.sessionId, this.state.eventCount);
    for (const event of batch.events) {
      this.state = applyEvent(this.state, event);
    }
  }

  private guard(): void {
    if (this.dialog) throw new DialogOpenError();
  }

  async clickAt(u: number, v: number): Promise<string> {
    this.guard();
    const result = await this.client.action<{ design: { id: string } }>(
      this.sessionId, "click", { u, v });
    await this.sync();
    return result.design.id;
  }

  async evaluate(designId: string): Promise<void> {
    this.guard();
    await this.client.action(this.sessionId, "evaluate", { designId });
    await this.sync();
  }

  async nextGeneration(): Promise<void> {
    this.guard();
    const verb = this.state.mode === "saem" ? "generation" : "interaction";
    await this.client.action(this.sessionId, verb);
    await this.sync();
  }

  /** Opens the rationale dialog; every selection flow passes through it. */
  beginSelection(designId: string, slot?: number): void {
    this.guard();
    this.dialog = { designId, slot };
  }

  cancelSelection(): void {
    this.dialog = null;
  }

  /** Stage slider values; they ride along with the next confirmed
   * selection, so each interaction carries exactly one weight change. */
  setWeights(performance: number, closeness: number): void {
    if (slidersLocked(this.state)) {
      this.stagedWeights = { performance, closeness: 0 };
      return;
    }
    this.stagedWeights = { performance, closeness };
  }

  async confirmSelection(rationale: Rationale): Promise<void> {
    if (!this.dialog) throw new Error("no selection pending");
    const { designId, slot } = this.dialog;
    if (this.state.mode === "rem") {
      await this.client.action(this.sessionId, "select",
                               { slot, designId, rationale });
    } else {
      const params: Record<string, unknown> = { chosenId: designId, rationale };
      if (this.state.mode === "aem" && this.stagedWeights) {
        params.performance = this.stagedWeights.performance;
        params.closeness = this.stagedWeights.closeness;
        this.stagedWeights = null;
      }
      await this.client.action(this.sessionId, "select", params);
    }
    this.dialog = null;
    await this.sync();
  }

  async terminate(minInteractions = 16): Promise<void> {
    this.guard();
    if (!canTerminate(this.state, minInteractions)) {
      throw new Error("session cannot terminate yet");
    }
    await this.client.action(this.sessionId, "terminate");
    await this.sync();
  }
}
