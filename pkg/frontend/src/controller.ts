// Interaction logic between the view state and the API, kept free of
// DOM types: the page passes plain coordinates and callbacks in, so the
// same flows drive the browser and the headless tests.

import { ApiClient, ApiError } from "./api.js";
import { makeViewport, nearestPointIndex, toData, type Viewport } from "./geometry.js";
import { subscribe, type Subscription } from "./sse.js";
import { applyEvent, applyStateFetch, initialState, lastChartedEpoch, type ViewState } from "./state.js";
import type { Phase, SessionConfig } from "./types.js";

const MIN_DRAG_PX = 3;

export class Controller {
  readonly state: ViewState = initialState();
  viewport: Viewport | null = null;
  private stream: Subscription | null = null;

  constructor(
    readonly api: ApiClient,
    private readonly onChange: () => void,
  ) {}

  private notify(notice: string | null = null) {
    this.state.notice = notice;
    this.onChange();
  }

  async newSession(config: SessionConfig): Promise<void> {
    this.stream?.close();
    Object.assign(this.state, initialState());
    const sid = await this.api.createSession(config);
    this.state.sessionId = sid;
    this.state.lambda = config.loss.lambda;
    this.state.dataset = await this.api.getDataset(sid);
    this.state.grid = await this.api.getGrid(sid);
    await this.refreshExperiments();
    this.connectStream();
    this.notify();
  }

  setCanvasSize(width: number, height: number): void {
    if (this.state.grid) {
      this.viewport = makeViewport(this.state.grid, width, height);
    }
  }

  private connectStream(): void {
    const sid = this.state.sessionId!;
    this.state.streamConnected = true;
    this.stream = subscribe(
      this.api.base,
      sid,
      (event) => {
        applyEvent(this.state, event);
        this.onChange();
      },
      () => {
        // dropped stream: banner, resubscribe, then catch up from the
        // last charted epoch so no metric point is lost
        if (this.state.sessionId !== sid) return;
        this.state.streamConnected = false;
        this.notify("event stream dropped, reconnecting");
        setTimeout(() => {
          if (this.state.sessionId !== sid) return;
          this.connectStream();
          this.api.getState(sid, lastChartedEpoch(this.state)).then((payload) => {
            applyStateFetch(this.state, payload);
            this.notify();
          });
        }, 250);
      },
    );
  }

  private async control(action: "start" | "pause" | "resume" | "reset"): Promise<void> {
    const sid = this.state.sessionId;
    if (!sid) return;
    try {
      const out = await this.api[action](sid);
      this.state.phase = out.phase;
      if (action === "reset") {
        this.state.current = [];
        this.state.epoch = 0;
        this.state.lastLosses = null;
        this.state.grid = await this.api.getGrid(sid);
      }
      this.notify();
    } catch (error) {
      this.notify(error instanceof ApiError ? error.message : String(error));
    }
  }

  start() {
    return this.control("start");
  }

  pause() {
    return this.control("pause");
  }

  resume() {
    return this.control("resume");
  }

  reset() {
    return this.control("reset");
  }

  async setLambda(value: number): Promise<void> {
    if (!this.state.sessionId) return;
    try {
      const out = await this.api.setLambda(this.state.sessionId, value);
      this.state.lambda = out.lambda;
      this.notify();
    } catch (error) {
      this.notify(error instanceof ApiError ? error.message : String(error));
    }
  }

  canAnnotate(): boolean {
    return this.state.phase === "idle" || this.state.phase === "paused";
  }

  /** Mouse-down on the surface: snap to a training point and open a
   * draft arrow. While running, nudge toward Pause instead. */
  pointerDown(x: number, y: number): void {
    if (!this.viewport || !this.state.dataset) return;
    if (!this.canAnnotate()) {
      if (this.state.phase === "running") this.notify("pause training to annotate");
      return;
    }
    const index = nearestPointIndex(
      this.viewport,
      this.state.dataset.train.map((e) => e.x),
      { x, y },
    );
    if (index === null) {
      this.state.selectedIndex = null;
      this.notify();
      return;
    }
    this.state.selectedIndex = index;
    this.state.draft = { originIndex: index, vector: [0, 0] };
    this.notify();
  }

  pointerMove(x: number, y: number): void {
    const draft = this.state.draft;
    if (!draft || !this.viewport || !this.state.dataset) return;
    const origin = this.state.dataset.train[draft.originIndex].x;
    const at = toData(this.viewport, { x, y });
    draft.vector = [at[0] - origin[0], at[1] - origin[1]];
    this.onChange();
  }

  async pointerUp(): Promise<void> {
    const draft = this.state.draft;
    if (!draft || !this.viewport) return;
    this.state.draft = null;
    const pixels = Math.hypot(
      draft.vector[0] * this.viewport.scaleX,
      draft.vector[1] * this.viewport.scaleY,
    );
    if (pixels < MIN_DRAG_PX) {
      // zero-length release: discard silently, no API call
      this.notify();
      return;
    }
    try {
      const stored = await this.api.addAnnotation(
        this.state.sessionId!,
        draft.originIndex,
        draft.vector,
      );
      this.state.annotations = [...this.state.annotations, stored];
      this.notify();
    } catch (error) {
      this.notify(error instanceof ApiError ? error.message : String(error));
    }
  }

  async removeAnnotation(id: number): Promise<void> {
    try {
      await this.api.deleteAnnotation(this.state.sessionId!, id);
      this.state.annotations = this.state.annotations.filter((a) => a.id !== id);
      this.notify();
    } catch (error) {
      this.notify(error instanceof ApiError ? error.message : String(error));
    }
  }

  async saveExperiment(name: string): Promise<void> {
    if (!this.state.sessionId || !name) return;
    try {
      await this.api.saveExperiment(this.state.sessionId, name);
      await this.refreshExperiments();
      this.state.visibleExperiments.add(name);
      this.notify();
    } catch (error) {
      this.notify(error instanceof ApiError ? error.message : String(error));
    }
  }

  async deleteExperiment(name: string): Promise<void> {
    try {
      await this.api.deleteExperiment(name);
      this.state.visibleExperiments.delete(name);
      await this.refreshExperiments();
      this.notify();
    } catch (error) {
      this.notify(error instanceof ApiError ? error.message : String(error));
    }
  }

  toggleExperiment(name: string): void {
    if (this.state.visibleExperiments.has(name)) {
      this.state.visibleExperiments.delete(name);
    } else {
      this.state.visibleExperiments.add(name);
    }
    this.notify();
  }

  async refreshExperiments(): Promise<void> {
    this.state.experiments = await this.api.listExperiments();
  }

  buttonStates(): Record<"start" | "pause" | "resume" | "reset" | "save", boolean> {
    const phase: Phase = this.state.phase;
    return {
      start: phase === "idle",
      pause: phase === "running",
      resume: phase === "paused",
      reset: phase === "paused" || phase === "finished",
      save: this.state.current.length > 0,
    };
  }
}
