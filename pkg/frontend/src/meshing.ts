// Offset table -> triangle mesh. The half-breadth grid is mirrored about
// the centerplane, giving exactly 2 * stations * waterlines vertices; the
// two sheets share the grid topology with opposite winding so normals
// face outward on both sides.

import { HullSurface } from "./api.js";

export interface HullMesh {
  positions: Float32Array; // xyz triples, z up
  indices: Uint32Array;
  vertexCount: number;
}

export function meshFromOffsets(surface: HullSurface): HullMesh {
  const nx = surface.stations.length;
  const nz = surface.waterlines.length;
  const vertexCount = 2 * nx * nz;
  const positions = new Float32Array(vertexCount * 3);

  for (let side = 0; side < 2; side++) {
    const sign = side === 0 ? 1 : -1;
    for (let i = 0; i < nx; i++) {
      for (let j = 0; j < nz; j++) {
        const at = 3 * (side * nx * nz + i * nz + j);
        positions[at] = surface.stations[i];
        positions[at + 1] = sign * surface.halfBreadths[i][j];
        positions[at + 2] = surface.waterlines[j];
      }
    }
  }

  const quads = (nx - 1) * (nz - 1);
  const indices = new Uint32Array(2 * quads * 6);
  let cursor = 0;
  for (let side = 0; side < 2; side++) {
    const base = side * nx * nz;
    for (let i = 0; i < nx - 1; i++) {
      for (let j = 0; j < nz - 1; j++) {
        const a = base + i * nz + j;
        const b = base + (i + 1) * nz + j;
        const c = base + (i + 1) * nz + j + 1;
        const d = base + i * nz + j + 1;
        if (side === 0) {
          indices.set([a, b, c, a, c, d], cursor);
        } else {
          indices.set([a, c, b, a, d, c], cursor);
        }
        cursor += 6;
      }
    }
  }
  return { positions, indices, vertexCount };
}

/** Axis-aligned bounds of the mesh, for camera framing. */
export function meshBounds(mesh: HullMesh) {
  const min = [Infinity, Infinity, Infinity];
  const max = [-Infinity, -Infinity, -Infinity];
  for (let i = 0; i < mesh.positions.length; i += 3) {
    for (let axis = 0; axis < 3; axis++) {
      const value = mesh.positions[i + axis];
      if (value < min[axis]) min[axis] = value;
      if (value > max[axis]) max[axis] = value;
    }
  }
  return { min, max };
}
