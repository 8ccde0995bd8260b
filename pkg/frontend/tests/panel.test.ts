// @vitest-environment happy-dom
import { beforeEach, describe, expect, it } from "vitest";
import { InfoPanel, versionAt } from "../src/panel";
import { accountHistory } from "./helpers";

describe("versionAt", () => {
  const history = accountHistory();

  it("returns null before the artifact existed", () => {
    expect(versionAt({ ...history, versions: history.versions.slice(1) }, 0)).toBe(null);
  });

  it("returns the exact version at a commit that touched the file", () => {
    expect(versionAt(history, 0)?.change).toBe("Added");
    expect(versionAt(history, 3)?.change).toBe("Modified");
    expect(versionAt(history, 5)?.change).toBe("Moved");
  });

  it("carries the latest version forward through quiet commits", () => {
    const v = versionAt(history, 4);
    expect(v?.ordinal).toBe(3);
    expect(v?.path).toBe("src/Account.java");
  });

  it("returns null from the deletion commit onward", () => {
    expect(versionAt(history, 8)).toBe(null);
    expect(versionAt(history, 11)).toBe(null);
  });
});

describe("InfoPanel", () => {
  let container: HTMLElement;
  let panel: InfoPanel;

  beforeEach(() => {
    container = document.createElement("aside");
    document.body.replaceChildren(container);
    panel = new InfoPanel(container);
  });

  const metricCell = (key: string): string | undefined =>
    container.querySelector<HTMLElement>(`td[data-metric="${key}"]`)?.textContent ?? undefined;

  it("starts and clears to the empty state", () => {
    expect(container.classList.contains("info-panel--empty")).toBe(true);
    panel.show(accountHistory(), 3);
    expect(container.classList.contains("info-panel--empty")).toBe(false);
    panel.clear();
    expect(container.classList.contains("info-panel--empty")).toBe(true);
    expect(container.children.length).toBe(0);
  });

  it("shows the version's path, kind, change and every metric value", () => {
    panel.show(accountHistory(), 3);
    expect(container.querySelector("h3")?.textContent).toBe("src/Account.java");
    expect(container.querySelector(".info-panel-kind")?.textContent).toBe(
      "SourceClassContainer (Modified)",
    );
    expect(metricCell("num_classes")).toBe("1");
    expect(metricCell("num_instance_variables")).toBe("3");
    expect(metricCell("num_for_loops")).toBe("1");
    expect(metricCell("num_methods")).toBe("5");
    expect(metricCell("lines_of_code")).toBe("26");
  });

  it("follows the artifact to its new path after a move", () => {
    panel.show(accountHistory(), 6);
    expect(container.querySelector("h3")?.textContent).toBe("app/Account.java");
    expect(container.querySelector(".info-panel-kind")?.textContent).toBe(
      "SourceClassContainer (Moved)",
    );
  });

  it("lists the move history", () => {
    panel.show(accountHistory(), 5);
    const moves = container.querySelector(".info-panel-moves")?.textContent ?? "";
    expect(moves).toContain("#5");
    expect(moves).toContain("src/Account.java");
    expect(moves).toContain("app/Account.java");
  });

  it("falls back to identity-only display after deletion", () => {
    panel.show(accountHistory(), 9);
    expect(container.querySelector("h3")?.textContent).toBe("src/Account.java");
    expect(container.querySelector(".info-panel-kind")?.textContent).toBe(
      "SourceClassContainer",
    );
    expect(container.querySelector(".info-panel-metrics")).toBe(null);
  });
});
