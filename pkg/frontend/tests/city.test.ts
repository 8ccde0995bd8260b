import { describe, expect, it } from "vitest";
import { Line, Mesh } from "three";
import type { BufferGeometry, LineBasicMaterial, MeshLambertMaterial } from "three";
import {
  applySelection,
  buildCityGroup,
  childrenOfKind,
  findByArtifact,
} from "../src/city";
import { HIGHLIGHT_COLOR, MOVE_ARC_COLOR, paletteColor } from "../src/palettes";
import { ACCOUNT_ARTIFACT, sceneFixture } from "./helpers";

const positions = (geometry: BufferGeometry): number[][] => {
  const attr = geometry.getAttribute("position");
  const out: number[][] = [];
  for (let i = 0; i < attr.count; i++) {
    out.push([attr.getX(i), attr.getY(i), attr.getZ(i)]);
  }
  return out;
};

describe("buildCityGroup", () => {
  it("creates exactly one child per document entry, in document order", () => {
    for (const ordinal of [0, 5, 11]) {
      const doc = sceneFixture(ordinal);
      const group = buildCityGroup(doc);
      expect(group.name).toBe(`commit-${ordinal}`);
      expect(group.children.length).toBe(
        doc.meshes.length + doc.access_lines.length + doc.arcs.length,
      );
      expect(childrenOfKind(group, "mesh").length).toBe(doc.meshes.length);
      expect(childrenOfKind(group, "access").length).toBe(doc.access_lines.length);
      expect(childrenOfKind(group, "arc").length).toBe(doc.arcs.length);
    }
  });

  it("builds an empty group for a scene with no entries", () => {
    const doc = sceneFixture(0);
    doc.meshes = [];
    doc.access_lines = [];
    doc.arcs = [];
    expect(buildCityGroup(doc).children.length).toBe(0);
  });

  it("places and sizes buildings from the document, not from any recomputation", () => {
    const doc = sceneFixture(5);
    const group = buildCityGroup(doc);
    const meshes = childrenOfKind(group, "mesh") as Mesh[];
    doc.meshes.forEach((entry, i) => {
      const mesh = meshes[i];
      expect(mesh.position.toArray()).toEqual(entry.position);
      expect(mesh.scale.toArray()).toEqual(entry.dimensions);
      expect(mesh.userData.id).toBe(entry.id);
      expect(mesh.userData.glyph).toBe(entry.glyph);
      expect(mesh.userData.path).toBe(entry.path);
      expect(mesh.userData.metrics).toEqual(entry.metrics);
      expect(mesh.userData.changed).toBe(entry.changed);
      expect(mesh.userData.selected).toBe(false);
    });
  });

  it("colors each building through its palette ramp", () => {
    const doc = sceneFixture(5);
    const meshes = childrenOfKind(buildCityGroup(doc), "mesh") as Mesh[];
    doc.meshes.forEach((entry, i) => {
      const material = meshes[i].material as MeshLambertMaterial;
      const expected = paletteColor(entry.palette, entry.color);
      expect(material.color.getHexString()).toBe(expected.getHexString());
    });
  });

  it("tints changed buildings and leaves untouched ones dark", () => {
    const doc = sceneFixture(5);
    const meshes = childrenOfKind(buildCityGroup(doc), "mesh") as Mesh[];
    const byChanged = (flag: boolean) =>
      meshes.filter((m) => m.userData.changed === flag);
    expect(byChanged(true).length).toBeGreaterThan(0);
    expect(byChanged(false).length).toBeGreaterThan(0);
    for (const mesh of byChanged(true)) {
      expect((mesh.material as MeshLambertMaterial).emissive.getHexString()).toBe("3a2a00");
    }
    for (const mesh of byChanged(false)) {
      expect((mesh.material as MeshLambertMaterial).emissive.getHexString()).toBe("000000");
    }
  });

  it("draws access lines straight from table slab to building roof", () => {
    const doc = sceneFixture(5);
    const lines = childrenOfKind(buildCityGroup(doc), "access") as Line[];
    doc.access_lines.forEach((entry, i) => {
      const points = positions(lines[i].geometry).map((p) => p.map((v) => +v.toFixed(3)));
      expect(points).toEqual([entry.from, entry.to]);
      expect(lines[i].userData.table).toBe(entry.table);
      expect(lines[i].userData.artifact).toBe(entry.artifact);
      expect(lines[i].userData.statements).toBe(entry.statements);
    });
  });

  it("draws move arcs as curves lifted above both endpoints", () => {
    const doc = sceneFixture(5);
    const arcs = childrenOfKind(buildCityGroup(doc), "arc") as Line[];
    expect(arcs.length).toBe(3);
    doc.arcs.forEach((entry, i) => {
      const points = positions(arcs[i].geometry);
      expect(points.length).toBe(25);
      expect(points[0].map((v) => +v.toFixed(3))).toEqual(entry.from);
      expect(points[24].map((v) => +v.toFixed(3))).toEqual(entry.to);
      const apex = Math.max(...points.map((p) => p[1]));
      expect(apex).toBeGreaterThan(entry.from[1]);
      expect(apex).toBeGreaterThan(entry.to[1]);
      const material = arcs[i].material as LineBasicMaterial;
      expect(material.color.getHexString()).toBe(MOVE_ARC_COLOR.getHexString());
      expect(arcs[i].userData.fromPath).toBe(entry.from_path);
      expect(arcs[i].userData.toPath).toBe(entry.to_path);
    });
  });
});

describe("applySelection", () => {
  it("glows the selected building and flags its arc and access lines", () => {
    const group = buildCityGroup(sceneFixture(5));
    applySelection(group, ACCOUNT_ARTIFACT);

    const building = findByArtifact(group, ACCOUNT_ARTIFACT) as Mesh;
    expect(building.userData.selected).toBe(true);
    const material = building.material as MeshLambertMaterial;
    expect(material.emissive.getHexString()).toBe(HIGHLIGHT_COLOR.getHexString());

    const selectedArcs = childrenOfKind(group, "arc").filter((a) => a.userData.selected);
    expect(selectedArcs.length).toBe(1);
    expect(selectedArcs[0].userData.artifact).toBe(ACCOUNT_ARTIFACT);

    const selectedLines = childrenOfKind(group, "access").filter((l) => l.userData.selected);
    expect(selectedLines.map((l) => l.userData.table).sort()).toEqual([
      "accounts",
      "entries",
    ]);
  });

  it("dims unrelated lines while something is selected", () => {
    const group = buildCityGroup(sceneFixture(5));
    applySelection(group, ACCOUNT_ARTIFACT);
    for (const child of [...childrenOfKind(group, "arc"), ...childrenOfKind(group, "access")]) {
      const material = (child as Line).material as LineBasicMaterial;
      expect(material.opacity).toBe(child.userData.selected ? 1.0 : 0.25);
    }
  });

  it("clears back to the neutral state when selection is null", () => {
    const group = buildCityGroup(sceneFixture(5));
    applySelection(group, ACCOUNT_ARTIFACT);
    applySelection(group, null);
    for (const child of group.children) {
      expect(child.userData.selected).toBe(false);
    }
    const building = findByArtifact(group, ACCOUNT_ARTIFACT) as Mesh;
    // Account changed at the move commit, so the change tint comes back.
    expect((building.material as MeshLambertMaterial).emissive.getHexString()).toBe("3a2a00");
    for (const line of childrenOfKind(group, "access") as Line[]) {
      expect((line.material as LineBasicMaterial).opacity).toBe(1.0);
    }
  });

  it("keeps the highlight across scene swaps while the entity is alive", () => {
    // The app reapplies the current selection to every freshly built group.
    const at5 = buildCityGroup(sceneFixture(5));
    applySelection(at5, ACCOUNT_ARTIFACT);
    expect(findByArtifact(at5, ACCOUNT_ARTIFACT)?.userData.selected).toBe(true);

    const at0 = buildCityGroup(sceneFixture(0));
    applySelection(at0, ACCOUNT_ARTIFACT);
    expect(findByArtifact(at0, ACCOUNT_ARTIFACT)?.userData.selected).toBe(true);

    // After its deletion the building is absent; reapplying must not throw
    // and must leave nothing marked.
    const at11 = buildCityGroup(sceneFixture(11));
    applySelection(at11, ACCOUNT_ARTIFACT);
    expect(findByArtifact(at11, ACCOUNT_ARTIFACT)).toBeUndefined();
    expect(at11.children.filter((c) => c.userData.selected).length).toBe(0);
  });

  it("is idempotent when reapplied with the same artifact", () => {
    const group = buildCityGroup(sceneFixture(5));
    applySelection(group, ACCOUNT_ARTIFACT);
    applySelection(group, ACCOUNT_ARTIFACT);
    const selected = group.children.filter((c) => c.userData.selected);
    expect(selected.length).toBe(4); // building + arc + two access lines
  });
});
