import {
  BoxGeometry,
  BufferGeometry,
  Group,
  Line,
  LineBasicMaterial,
  Mesh,
  MeshLambertMaterial,
  Object3D,
  QuadraticBezierCurve3,
  Vector3,
} from "three";
import {
  ACCESS_LINE_COLOR,
  HIGHLIGHT_COLOR,
  MOVE_ARC_COLOR,
  paletteColor,
} from "./palettes";
import type { SceneDocument, Vec3 } from "./types";

const UNIT_BOX = new BoxGeometry(1, 1, 1);
const ARC_SEGMENTS = 24;
const ARC_LIFT = 14;

const vec = ([x, y, z]: Vec3) => new Vector3(x, y, z);

/**
 * Build one three.js group from a scene document. Pure data-to-objects
 * translation: exactly one child per mesh entry, one per access line, one
 * per move arc, in document order, each tagged through userData so picking
 * and tests can identify it. Lights and ground live outside this group.
 */
export function buildCityGroup(document: SceneDocument): Group {
  const group = new Group();
  group.name = `commit-${document.commit.ordinal}`;

  for (const entry of document.meshes) {
    const material = new MeshLambertMaterial({
      color: paletteColor(entry.palette, entry.color),
    });
    if (entry.changed) {
      material.emissive.set("#3a2a00");
    }
    const mesh = new Mesh(UNIT_BOX, material);
    mesh.scale.set(...entry.dimensions);
    mesh.position.set(...entry.position);
    mesh.userData = {
      kind: "mesh",
      id: entry.id,
      glyph: entry.glyph,
      path: entry.path,
      metrics: entry.metrics,
      changed: entry.changed,
      selected: false,
    };
    group.add(mesh);
  }

  for (const line of document.access_lines) {
    const geometry = new BufferGeometry().setFromPoints([vec(line.from), vec(line.to)]);
    const object = new Line(geometry, new LineBasicMaterial({ color: ACCESS_LINE_COLOR }));
    object.userData = {
      kind: "access",
      table: line.table,
      artifact: line.artifact,
      statements: line.statements,
      selected: false,
    };
    group.add(object);
  }

  for (const arc of document.arcs) {
    const from = vec(arc.from);
    const to = vec(arc.to);
    const mid = from.clone().lerp(to, 0.5);
    mid.y = Math.max(from.y, to.y) + ARC_LIFT;
    const curve = new QuadraticBezierCurve3(from, mid, to);
    const geometry = new BufferGeometry().setFromPoints(curve.getPoints(ARC_SEGMENTS));
    const object = new Line(geometry, new LineBasicMaterial({ color: MOVE_ARC_COLOR }));
    object.userData = {
      kind: "arc",
      artifact: arc.artifact,
      fromPath: arc.from_path,
      toPath: arc.to_path,
      selected: false,
    };
    group.add(object);
  }

  return group;
}

/**
 * Mark the selected artifact across the group: its building glows, its move
 * arc and access lines stay full strength while unrelated ones dim. Passing
 * null clears the selection. Idempotent over repeated calls.
 */
export function applySelection(group: Group, artifact: string | null): void {
  for (const child of group.children) {
    const data = child.userData;
    const related = artifact !== null && data.artifact === artifact;
    const isTarget = artifact !== null && (data.id === artifact || related);
    data.selected = isTarget;

    if (data.kind === "mesh") {
      const material = (child as Mesh).material as MeshLambertMaterial;
      if (isTarget) {
        material.emissive.copy(HIGHLIGHT_COLOR);
        material.emissiveIntensity = 0.6;
      } else {
        material.emissive.set(data.changed ? "#3a2a00" : "#000000");
        material.emissiveIntensity = 1.0;
      }
    } else {
      const material = (child as Line).material as LineBasicMaterial;
      material.opacity = artifact === null || isTarget ? 1.0 : 0.25;
      material.transparent = material.opacity < 1.0;
    }
  }
}

export function findByArtifact(group: Group, artifact: string): Object3D | undefined {
  return group.children.find((c) => c.userData.id === artifact);
}

export function childrenOfKind(group: Group, kind: "mesh" | "access" | "arc"): Object3D[] {
  return group.children.filter((c) => c.userData.kind === kind);
}
