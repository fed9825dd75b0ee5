// Page bootstrap: builds the layout, wires DOM events to the controller,
// repaints on state changes.

import { ApiClient } from "./api.js";
import { Controller } from "./controller.js";
import { drawChart, drawSurface } from "./render.js";
import type { SessionConfig } from "./types.js";

const app = document.querySelector<HTMLDivElement>("#app")!;
app.innerHTML = `
  <header>
    <h1>steergrad</h1>
    <span id="phase" class="badge">no session</span>
    <span id="notice"></span>
  </header>
  <main>
    <aside class="left">
      <section>
        <h2>Data</h2>
        <label>shape
          <select id="shape">
            <option>blobs</option><option>moons</option><option>circles</option>
          </select>
        </label>
        <label>train points <input id="n-train" type="number" value="9" min="2"></label>
        <label>test points <input id="n-test" type="number" value="200" min="1"></label>
        <label>noise <input id="noise" type="number" step="0.05" placeholder="default"></label>
        <label>seed <input id="seed" type="number" value="0" min="0"></label>
        <label>hidden layers <input id="hidden" value="16,16"></label>
        <label>epochs <input id="epochs" type="number" value="2000" min="1"></label>
        <label>direction weight <input id="lambda" type="number" value="1.0" step="0.1" min="0"></label>
        <label>steepness <input id="steepness" type="number" value="20" min="1"></label>
        <button id="create">new session</button>
      </section>
      <section>
        <h2>Annotations</h2>
        <p class="hint">Pause, then drag from a training point in the
        direction that should cross the boundary. The draft arrow is
        green; stored arrows are black.</p>
        <ul id="annotations"></ul>
      </section>
    </aside>
    <section class="center">
      <div class="controls">
        <button id="start">start</button>
        <button id="pause">pause</button>
        <button id="resume">resume</button>
        <button id="reset">reset</button>
        <input id="save-name" placeholder="experiment name">
        <button id="save">save</button>
      </div>
      <canvas id="chart" width="640" height="220"></canvas>
      <canvas id="surface" width="640" height="480"></canvas>
      <div id="metrics" class="hint"></div>
    </section>
    <aside class="right">
      <h2>Experiments</h2>
      <table id="results">
        <thead><tr><th>show</th><th>name</th><th>final accuracy</th><th></th></tr></thead>
        <tbody></tbody>
      </table>
    </aside>
  </main>
`;

const el = <T extends HTMLElement>(id: string) => document.querySelector<T>("#" + id)!;
const surface = el<HTMLCanvasElement>("surface");
const chart = el<HTMLCanvasElement>("chart");

let repaintQueued = false;
const controller = new Controller(new ApiClient(""), () => {
  if (!repaintQueued) {
    repaintQueued = true;
    requestAnimationFrame(() => {
      repaintQueued = false;
      repaint();
    });
  }
});

function readConfig(): SessionConfig {
  const noiseRaw = el<HTMLInputElement>("noise").value.trim();
  return {
    dataset: {
      shape: el<HTMLSelectElement>("shape").value as SessionConfig["dataset"]["shape"],
      n_train: Number(el<HTMLInputElement>("n-train").value),
      n_test: Number(el<HTMLInputElement>("n-test").value),
      noise: noiseRaw === "" ? null : Number(noiseRaw),
      seed: Number(el<HTMLInputElement>("seed").value),
    },
    model: {
      hidden_layers: el<HTMLInputElement>("hidden")
        .value.split(",")
        .map((w) => Number(w.trim()))
        .filter((w) => w > 0),
      activation: "tanh",
      seed: Number(el<HTMLInputElement>("seed").value),
      input_dim: 2,
    },
    loss: {
      steepness: Number(el<HTMLInputElement>("steepness").value),
      lambda: Number(el<HTMLInputElement>("lambda").value),
    },
    max_epochs: Number(el<HTMLInputElement>("epochs").value),
    snapshot_every: 10,
  };
}

el<HTMLButtonElement>("create").addEventListener("click", async () => {
  try {
    await controller.newSession(readConfig());
    controller.setCanvasSize(surface.width, surface.height);
  } catch (error) {
    el("notice").textContent = String(error);
  }
});
el<HTMLButtonElement>("start").addEventListener("click", () => controller.start());
el<HTMLButtonElement>("pause").addEventListener("click", () => controller.pause());
el<HTMLButtonElement>("resume").addEventListener("click", () => controller.resume());
el<HTMLButtonElement>("reset").addEventListener("click", () => controller.reset());
el<HTMLButtonElement>("save").addEventListener("click", () => {
  controller.saveExperiment(el<HTMLInputElement>("save-name").value.trim());
});
el<HTMLInputElement>("lambda").addEventListener("change", (event) => {
  if (controller.state.sessionId) {
    controller.setLambda(Number((event.target as HTMLInputElement).value));
  }
});

function canvasPoint(event: MouseEvent) {
  const rect = surface.getBoundingClientRect();
  return {
    x: ((event.clientX - rect.left) / rect.width) * surface.width,
    y: ((event.clientY - rect.top) / rect.height) * surface.height,
  };
}
surface.addEventListener("mousedown", (event) => {
  const p = canvasPoint(event);
  controller.pointerDown(p.x, p.y);
});
surface.addEventListener("mousemove", (event) => {
  const p = canvasPoint(event);
  controller.pointerMove(p.x, p.y);
});
surface.addEventListener("mouseup", () => controller.pointerUp());

function repaint() {
  const s = controller.state;
  el("phase").textContent = s.sessionId ? `${s.phase} · epoch ${s.epoch}` : "no session";
  el("notice").textContent = s.notice ?? (s.streamConnected ? "" : "");
  const buttons = controller.buttonStates();
  for (const name of ["start", "pause", "resume", "reset", "save"] as const) {
    el<HTMLButtonElement>(name).disabled = !s.sessionId || !buttons[name];
  }
  if (s.lastLosses) {
    el("metrics").textContent =
      `cross entropy ${s.lastLosses.bce.toFixed(4)} · direction ${s.lastLosses.direction.toFixed(4)}` +
      ` · total ${s.lastLosses.total.toFixed(4)} · weight ${s.lambda}`;
  }
  if (controller.viewport && s.dataset) {
    drawSurface(
      surface,
      controller.viewport,
      s.grid,
      s.dataset.train,
      s.dataset.test,
      s.annotations,
      s.draft,
      s.selectedIndex,
    );
  }
  drawChart(
    chart,
    s.current,
    s.experiments
      .filter((e) => s.visibleExperiments.has(e.name))
      .map((e) => ({ name: e.name, series: e.accuracy_series })),
  );
  const tbody = el<HTMLTableSectionElement>("results").querySelector("tbody")!;
  tbody.innerHTML = "";
  for (const record of s.experiments) {
    const row = document.createElement("tr");
    const visible = s.visibleExperiments.has(record.name);
    row.innerHTML = `
      <td><input type="checkbox" ${visible ? "checked" : ""}></td>
      <td>${record.name}</td>
      <td>${record.final_accuracy.toFixed(4)}</td>
      <td><button>delete</button></td>`;
    row.querySelector("input")!.addEventListener("change", () =>
      controller.toggleExperiment(record.name),
    );
    row.querySelector("button")!.addEventListener("click", () =>
      controller.deleteExperiment(record.name),
    );
    tbody.appendChild(row);
  }
  const list = el<HTMLUListElement>("annotations");
  list.innerHTML = "";
  for (const a of s.annotations) {
    const item = document.createElement("li");
    item.textContent =
      `#${a.id} point ${a.example_index} -> (${a.direction[0].toFixed(2)}, ` +
      `${a.direction[1].toFixed(2)}) `;
    const remove = document.createElement("button");
    remove.textContent = "x";
    remove.addEventListener("click", () => controller.removeAnnotation(a.id));
    item.appendChild(remove);
    list.appendChild(item);
  }
}

repaint();
