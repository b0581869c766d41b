// App bootstrap: participant lifecycle, the three mode screens, and the
// live event stream that keeps the view a fold of the server log.

import { Client, EmbeddingPayload } from "./api.js";
import { renderPanel } from "./panels.js";
import { attachScatter } from "./scatter.js";
import { SessionStore } from "./state.js";
import { createHullViewer, HullViewer } from "./viewer3d.js";

const SERVER = (window as any).HULLSPACE_SERVER ?? "http://127.0.0.1:8000";

async function boot() {
  const client = new Client(SERVER);
  const app = document.getElementById("app")!;
  app.innerHTML = "<h2>hull design-space exploration</h2>";

  const seed = Number(new URLSearchParams(location.search).get("seed") ?? Date.now() % 1e9);
  const participant = await client.createParticipant(seed);
  const banner = document.createElement("p");
  banner.textContent =
    `participant ${participant.participantId} - mode order ${participant.modeOrder.join(" > ")}`;
  app.appendChild(banner);

  for (const mode of participant.modeOrder) {
    await runMode(client, app, participant.participantId, mode);
  }
  banner.textContent += " - all modes complete, thank you";
}

async function runMode(client: Client, app: HTMLElement, pid: string, mode: string) {
  const { sessionId } = await client.startMode(pid, mode);
  const store = new SessionStore(client, sessionId);
  await store.sync();

  const screen = document.createElement("div");
  screen.className = `screen ${mode}`;
  screen.innerHTML = `<h3>${mode} exploration</h3>`;
  app.appendChild(screen);

  const stage = document.createElement("div");
  stage.className = "stage";
  screen.appendChild(stage);
  const viewerBox = document.createElement("div");
  viewerBox.className = "viewer";
  stage.appendChild(viewerBox);
  const viewer: HullViewer = createHullViewer(viewerBox);

  const panelBox = document.createElement("div");
  panelBox.className = "panel";
  screen.appendChild(panelBox);

  const hooks = {
    onInspect: async (designId: string) => {
      viewer.show(await client.design(sessionId, designId));
    },
    onFinished: () => refresh(),
  };
  const refresh = renderPanel(panelBox, store, hooks);

  if (mode === "rem") {
    const state = await client.sessionState(sessionId);
    const embedding = state.embedding as unknown as EmbeddingPayload;
    const canvas = document.createElement("canvas");
    canvas.width = 640;
    canvas.height = 480;
    stage.insertBefore(canvas, viewerBox);
    const scatter = attachScatter(canvas, {
      points: embedding.points,
      boundary: embedding.hullPolygon,
    }, async (u, v) => {
      const designId = await store.clickAt(u, v);
      scatter.highlight(embedding.designIds.indexOf(designId));
      hooks.onInspect(designId);
      refresh();
    });
  } else {
    await store.nextGeneration();
    refresh();
  }

  await new Promise<void>((resolve) => {
    const poll = setInterval(async () => {
      await store.sync();
      if (store.state.terminated) {
        clearInterval(poll);
        viewer.dispose();
        resolve();
      }
    }, 500);
  });
}

boot().catch((error) => {
  document.getElementById("app")!.textContent = `failed to start: ${error}`;
});
