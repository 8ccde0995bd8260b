import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import { ApiClient } from "../src/api";
import type { EntityHistory, SceneDocument } from "../src/types";

const FIXTURES = join(dirname(fileURLToPath(import.meta.url)), "fixtures");

export function fixture<T>(name: string): T {
  return JSON.parse(readFileSync(join(FIXTURES, `${name}.json`), "utf-8")) as T;
}

export const sceneFixture = (ordinal: number): SceneDocument =>
  fixture<SceneDocument>(`scene_${ordinal}`);

export const accountHistory = (): EntityHistory => fixture<EntityHistory>("entity_account");

export const ACCOUNT_ARTIFACT = accountHistory().artifact;

/**
 * ApiClient wired to a fetch stub that serves the checked-in fixture
 * documents (captured verbatim from the HTTP API). Unknown scene ordinals
 * reuse the head document so playback can sweep the full range.
 */
export function fixtureApi(): { api: ApiClient; calls: string[] } {
  const calls: string[] = [];
  const respond = (body: unknown): Response =>
    new Response(JSON.stringify(body), {
      status: 200,
      headers: { "content-type": "application/json" },
    });

  const api = new ApiClient("http://stub", async (url) => {
    const path = new URL(url).pathname;
    calls.push(path);

    const scene = path.match(/\/scenes\/(\d+)$/);
    if (scene) {
      const ordinal = Number(scene[1]);
      const available = [0, 5, 11].includes(ordinal) ? ordinal : 11;
      const document = sceneFixture(available);
      document.commit.ordinal = ordinal;
      return respond(document);
    }
    if (path.endsWith("/timeline")) {
      return respond(fixture("timeline"));
    }
    if (path.includes("/entities/")) {
      const artifact = path.split("/entities/")[1].split("/")[0];
      if (artifact !== ACCOUNT_ARTIFACT) {
        return new Response(JSON.stringify({ detail: "unknown artifact" }), { status: 404 });
      }
      return respond(accountHistory());
    }
    if (path.match(/\/projects\/[^/]+$/)) {
      return respond(fixture("record"));
    }
    return new Response(JSON.stringify({ detail: `unstubbed: ${path}` }), { status: 404 });
  });
  return { api, calls };
}
