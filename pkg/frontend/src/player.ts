import type { ApiClient } from "./api";
import type {
  EntityHistory,
  ProjectRecord,
  SceneDocument,
  TimelineRow,
} from "./types";

export type PlaybackMode =
  | "paused"
  | "forward"
  | "backward"
  | "fast-forward"
  | "fast-backward";

export interface ViewState {
  ordinal: number;
  mode: PlaybackMode;
  selected: string | null;
}

export interface PlayerEvents {
  onScene(document: SceneDocument, ordinal: number): void;
  onSelect(history: EntityHistory | null): void;
  onMode?(mode: PlaybackMode): void;
}

const STEP_INTERVAL_MS: Record<Exclude<PlaybackMode, "paused">, number> = {
  forward: 500,
  backward: 500,
  "fast-forward": 100,
  "fast-backward": 100,
};

const direction = (mode: PlaybackMode): number =>
  mode === "forward" || mode === "fast-forward" ? 1 : -1;

/**
 * Headless playback core: owns the view state, fetches scenes through the
 * API client, and pushes them to the renderer through callbacks. Seeks are
 * guarded latest-wins, so a slow response for an old ordinal never
 * overwrites a newer one. The playback timer only exists while a
 * non-paused mode is active and stops itself at either end of the history.
 */
export class Player {
  readonly state: ViewState = { ordinal: 0, mode: "paused", selected: null };
  record: ProjectRecord | null = null;
  timeline: TimelineRow[] = [];

  private seekSequence = 0;
  private timer: ReturnType<typeof setInterval> | null = null;

  constructor(
    private readonly api: ApiClient,
    private readonly projectId: string,
    private readonly events: PlayerEvents,
  ) {}

  get headOrdinal(): number {
    return this.record ? this.record.num_commits - 1 : 0;
  }

  async load(): Promise<void> {
    this.record = await this.api.getProject(this.projectId);
    if (this.record.status !== "done") {
      throw new Error(`project is ${this.record.status}`);
    }
    this.timeline = (await this.api.getTimeline(this.projectId)).commits;
    await this.seek(0);
  }

  clamp(ordinal: number): number {
    return Math.min(Math.max(ordinal, 0), this.headOrdinal);
  }

  async seek(ordinal: number): Promise<void> {
    const target = this.clamp(ordinal);
    const sequence = ++this.seekSequence;
    const document = await this.api.getScene(this.projectId, target);
    if (sequence !== this.seekSequence) {
      return; // a newer seek finished first
    }
    this.state.ordinal = target;
    this.events.onScene(document, target);
  }

  async step(offset: number): Promise<void> {
    await this.seek(this.state.ordinal + offset);
  }

  play(mode: PlaybackMode): void {
    this.stopTimer();
    this.state.mode = mode;
    this.events.onMode?.(mode);
    if (mode === "paused") {
      return;
    }
    const delta = direction(mode);
    this.timer = setInterval(() => {
      const next = this.state.ordinal + delta;
      if (next < 0 || next > this.headOrdinal) {
        this.pause();
        return;
      }
      void this.seek(next);
    }, STEP_INTERVAL_MS[mode]);
  }

  pause(): void {
    this.stopTimer();
    if (this.state.mode !== "paused") {
      this.state.mode = "paused";
      this.events.onMode?.("paused");
    }
  }

  get playing(): boolean {
    return this.timer !== null;
  }

  async select(artifact: string | null): Promise<void> {
    this.state.selected = artifact;
    if (artifact === null) {
      this.events.onSelect(null);
      return;
    }
    const history = await this.api.getEntityHistory(this.projectId, artifact);
    if (this.state.selected === artifact) {
      this.events.onSelect(history);
    }
  }

  dispose(): void {
    this.stopTimer();
  }

  private stopTimer(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }
}
