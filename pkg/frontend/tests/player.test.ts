import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";
import { ApiClient } from "../src/api";
import { Player } from "../src/player";
import type { PlayerEvents } from "../src/player";
import type { EntityHistory, SceneDocument } from "../src/types";
import { ACCOUNT_ARTIFACT, fixture, fixtureApi, sceneFixture } from "./helpers";

interface Captured {
  scenes: Array<{ ordinal: number; document: SceneDocument }>;
  selections: Array<EntityHistory | null>;
  modes: string[];
}

function capture(): { events: PlayerEvents; seen: Captured } {
  const seen: Captured = { scenes: [], selections: [], modes: [] };
  return {
    seen,
    events: {
      onScene: (document, ordinal) => seen.scenes.push({ ordinal, document }),
      onSelect: (history) => seen.selections.push(history),
      onMode: (mode) => seen.modes.push(mode),
    },
  };
}

async function loadedPlayer() {
  const { api } = fixtureApi();
  const { events, seen } = capture();
  const player = new Player(api, "d024a7e8a77db42a", events);
  await player.load();
  return { player, seen };
}

describe("Player.load", () => {
  it("fetches the record and timeline, then lands on the first commit", async () => {
    const { player, seen } = await loadedPlayer();
    expect(player.headOrdinal).toBe(11);
    expect(player.timeline.length).toBe(12);
    expect(seen.scenes.length).toBe(1);
    expect(seen.scenes[0].ordinal).toBe(0);
    expect(seen.scenes[0].document.meshes.length).toBe(7);
  });

  it("refuses projects that are not finished", async () => {
    const api = new ApiClient("http://stub", async () =>
      new Response(JSON.stringify({ ...fixture<object>("record"), status: "running" }), {
        status: 200,
      }),
    );
    const player = new Player(api, "p", capture().events);
    await expect(player.load()).rejects.toThrow("project is running");
  });
});

describe("Player.seek", () => {
  it("clamps out-of-range ordinals to the history bounds", async () => {
    const { player, seen } = await loadedPlayer();
    await player.seek(99);
    expect(player.state.ordinal).toBe(11);
    await player.seek(-3);
    expect(player.state.ordinal).toBe(0);
    expect(seen.scenes.map((s) => s.ordinal)).toEqual([0, 11, 0]);
  });

  it("steps relative to the current position", async () => {
    const { player, seen } = await loadedPlayer();
    await player.seek(5);
    await player.step(1);
    await player.step(-2);
    expect(seen.scenes.map((s) => s.ordinal)).toEqual([0, 5, 6, 4]);
  });

  it("discards a slow response once a newer seek has landed", async () => {
    const pending = new Map<number, (response: Response) => void>();
    const api = new ApiClient("http://stub", (url) => {
      const path = new URL(url).pathname;
      const scene = path.match(/\/scenes\/(\d+)$/);
      if (scene) {
        return new Promise<Response>((resolve) => {
          pending.set(Number(scene[1]), resolve);
        });
      }
      const body = path.endsWith("/timeline") ? fixture("timeline") : fixture("record");
      return Promise.resolve(new Response(JSON.stringify(body), { status: 200 }));
    });

    const { events, seen } = capture();
    const player = new Player(api, "p", events);
    const loading = player.load(); // awaits seek(0), kept pending below

    await vi.waitFor(() => expect(pending.has(0)).toBe(true));
    const slow = player.seek(5);
    await vi.waitFor(() => expect(pending.has(5)).toBe(true));
    const fast = player.seek(11);
    await vi.waitFor(() => expect(pending.has(11)).toBe(true));

    const respond = (ordinal: number) => {
      const doc = sceneFixture(11);
      doc.commit.ordinal = ordinal;
      pending.get(ordinal)!(new Response(JSON.stringify(doc), { status: 200 }));
    };
    respond(11); // newest seek finishes first
    await fast;
    respond(5); // stale responses arrive late
    respond(0);
    await slow;
    await loading;

    expect(player.state.ordinal).toBe(11);
    expect(seen.scenes.map((s) => s.ordinal)).toEqual([11]);
  });
});

describe("Player playback", () => {
  beforeEach(() => {
    vi.useFakeTimers();
  });
  afterEach(() => {
    vi.useRealTimers();
  });

  it("advances one commit per 500ms tick in forward mode", async () => {
    const { player, seen } = await loadedPlayer();
    player.play("forward");
    expect(player.playing).toBe(true);
    await vi.advanceTimersByTimeAsync(1500);
    expect(seen.scenes.map((s) => s.ordinal)).toEqual([0, 1, 2, 3]);
    player.pause();
    expect(player.playing).toBe(false);
    await vi.advanceTimersByTimeAsync(2000);
    expect(seen.scenes.length).toBe(4);
  });

  it("fast mode steps at least five commits per second", async () => {
    const { player, seen } = await loadedPlayer();
    player.play("fast-forward");
    await vi.advanceTimersByTimeAsync(1000);
    const advanced = seen.scenes.length - 1;
    expect(advanced).toBeGreaterThanOrEqual(5);
    expect(seen.scenes.map((s) => s.ordinal)).toEqual([0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10]);
  });

  it("stops by itself at the end of history", async () => {
    const { player, seen } = await loadedPlayer();
    await player.seek(10);
    player.play("forward");
    await vi.advanceTimersByTimeAsync(3000);
    expect(player.state.ordinal).toBe(11);
    expect(player.state.mode).toBe("paused");
    expect(player.playing).toBe(false);
    expect(seen.scenes.map((s) => s.ordinal)).toEqual([0, 10, 11]);
  });

  it("plays backward and stops at the first commit", async () => {
    const { player, seen } = await loadedPlayer();
    await player.seek(2);
    player.play("backward");
    await vi.advanceTimersByTimeAsync(3000);
    expect(player.state.ordinal).toBe(0);
    expect(player.state.mode).toBe("paused");
    expect(seen.scenes.map((s) => s.ordinal)).toEqual([0, 2, 1, 0]);
  });

  it("switching modes replaces the previous timer instead of stacking", async () => {
    const { player, seen } = await loadedPlayer();
    player.play("forward");
    player.play("fast-forward");
    await vi.advanceTimersByTimeAsync(500);
    // 5 fast ticks, not 5 fast + 1 slow
    expect(seen.scenes.map((s) => s.ordinal)).toEqual([0, 1, 2, 3, 4, 5]);
    expect(seen.modes).toEqual(["forward", "fast-forward"]);
  });
});

describe("Player.select", () => {
  it("publishes the fetched history for the selected artifact", async () => {
    const { player, seen } = await loadedPlayer();
    await player.select(ACCOUNT_ARTIFACT);
    expect(seen.selections.length).toBe(1);
    expect(seen.selections[0]?.artifact).toBe(ACCOUNT_ARTIFACT);
    expect(seen.selections[0]?.moves).toEqual([
      { from: "src/Account.java", ordinal: 5, to: "app/Account.java" },
    ]);
  });

  it("clears immediately and drops a stale history response", async () => {
    let release: ((r: Response) => void) | null = null;
    const api = new ApiClient("http://stub", (url) => {
      const path = new URL(url).pathname;
      if (path.includes("/entities/")) {
        return new Promise<Response>((resolve) => {
          release = resolve;
        });
      }
      const body = path.endsWith("/timeline")
        ? fixture("timeline")
        : path.match(/\/scenes\/\d+$/)
          ? sceneFixture(0)
          : fixture("record");
      return Promise.resolve(new Response(JSON.stringify(body), { status: 200 }));
    });
    const { events, seen } = capture();
    const player = new Player(api, "p", events);
    await player.load();

    const slow = player.select(ACCOUNT_ARTIFACT);
    await player.select(null); // user deselects before the fetch lands
    release!(new Response(JSON.stringify(fixture("entity_account")), { status: 200 }));
    await slow;

    expect(player.state.selected).toBe(null);
    expect(seen.selections).toEqual([null]);
  });
});
