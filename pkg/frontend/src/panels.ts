// Mode panels: the slot board for the random mode, design galleries with
// select buttons for the interactive modes, the weight sliders for the
// automated mode, and the rationale dialog every selection passes through.

import {
  Rationale,
  SessionStore,
  canTerminate,
  displayCw,
  formatCw,
  slidersLocked,
  slotCount,
} from "./state.js";

const RATIONALES: Rationale[] = ["form", "performance", "both"];

export interface PanelHooks {
  onInspect(designId: string): void;
  onFinished(): void;
}

export function renderPanel(root: HTMLElement, store: SessionStore,
                            hooks: PanelHooks): () => void {
  const refresh = () => {
    root.innerHTML = "";
    if (store.state.mode === "rem") {
      renderSlotBoard(root, store);
    } else {
      renderGallery(root, store, hooks);
      if (store.state.mode === "aem") renderSliders(root, store);
    }
    renderDialog(root, store, refresh);
    renderFooter(root, store, hooks, refresh);
  };
  refresh();
  return refresh;
}

function renderSlotBoard(root: HTMLElement, store: SessionStore) {
  const board = document.createElement("div");
  board.className = "slot-board";
  board.innerHTML = "<h3>Preferred designs</h3>";
  for (let slot = 1; slot <= 5; slot++) {
    const entry = store.state.slots[slot];
    const row = document.createElement("div");
    row.className = "slot";
    row.textContent = entry
      ? `${slot}. ${entry.designId} (${entry.rationale})`
      : `${slot}. empty`;
    board.appendChild(row);
  }
  const current = store.state.currentDesignId;
  if (current) {
    const info = document.createElement("div");
    info.className = "current-design";
    info.textContent =
      `viewing ${current} - Cw ${formatCw(displayCw(store.state, current))}`;
    board.appendChild(info);
  }
  root.appendChild(board);
}

function renderGallery(root: HTMLElement, store: SessionStore, hooks: PanelHooks) {
  const gallery = document.createElement("div");
  gallery.className = "gallery";
  for (const design of store.state.gallery) {
    const card = document.createElement("div");
    card.className = design.feasible ? "card" : "card infeasible";
    const label = document.createElement("div");
    label.textContent = `${design.id}  Cw ${formatCw(design.cw)}`;
    card.appendChild(label);

    const inspect = document.createElement("button");
    inspect.textContent = "view 3D";
    inspect.onclick = () => hooks.onInspect(design.id);
    card.appendChild(inspect);

    const select = document.createElement("button");
    select.textContent = "select";
    select.disabled = store.dialog !== null || store.state.terminated;
    select.onclick = () => {
      store.beginSelection(design.id);
      hooks.onFinished();
    };
    card.appendChild(select);
    gallery.appendChild(card);
  }
  root.appendChild(gallery);
}

function renderSliders(root: HTMLElement, store: SessionStore) {
  const locked = slidersLocked(store.state);
  const wrap = document.createElement("div");
  wrap.className = "sliders";
  const governing = store.state.governing ?? [0.7, 0.3];
  wrap.innerHTML = `<h4>objective weights</h4>`;
  for (const [index, name] of (["performance", "closeness"] as const).entries()) {
    const row = document.createElement("label");
    row.textContent = name;
    const slider = document.createElement("input");
    slider.type = "range";
    slider.min = "0";
    slider.max = "1";
    slider.step = "0.05";
    slider.value = String(governing[index]);
    slider.disabled = locked && name === "closeness";
    slider.oninput = () => {
      const performance = index === 0 ? Number(slider.value) : governing[0];
      const closeness = index === 1 ? Number(slider.value) : governing[1];
      store.setWeights(performance, closeness);
    };
    row.appendChild(slider);
    wrap.appendChild(row);
  }
  if (locked) {
    const note = document.createElement("div");
    note.className = "note";
    note.textContent = "closeness unlocks after your first selection";
    wrap.appendChild(note);
  }
  root.appendChild(wrap);
}

function renderDialog(root: HTMLElement, store: SessionStore, refresh: () => void) {
  if (!store.dialog) return;
  const overlay = document.createElement("div");
  overlay.className = "rationale-dialog";
  overlay.innerHTML =
    `<p>What dictated selecting ${store.dialog.designId}?</p>`;
  for (const rationale of RATIONALES) {
    const button = document.createElement("button");
    button.textContent = rationale;
    button.onclick = async () => {
      await store.confirmSelection(rationale);
      refresh();
    };
    overlay.appendChild(button);
  }
  root.appendChild(overlay);
}

function renderFooter(root: HTMLElement, store: SessionStore,
                      hooks: PanelHooks, refresh: () => void) {
  const footer = document.createElement("div");
  footer.className = "footer";
  const status = document.createElement("span");
  status.textContent = store.state.mode === "rem"
    ? `${slotCount(store.state)}/5 slots filled`
    : `interaction ${store.state.interactionCount}`;
  footer.appendChild(status);

  if (store.state.mode !== "rem") {
    const next = document.createElement("button");
    next.textContent = "next designs";
    next.disabled = store.dialog !== null || store.state.terminated;
    next.onclick = async () => {
      await store.nextGeneration();
      refresh();
    };
    footer.appendChild(next);
  }

  const finish = document.createElement("button");
  finish.textContent = "finish session";
  finish.disabled = !canTerminate(store.state) || store.dialog !== null;
  finish.onclick = async () => {
    await store.terminate();
    refresh();
    hooks.onFinished();
  };
  footer.appendChild(finish);
  root.appendChild(footer);
}
