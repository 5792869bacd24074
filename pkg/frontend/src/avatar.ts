// Deterministic geometric avatars.  The server assigns each commenter an
// avatar_seed; the same seed must render the same picture on every client,
// so everything below is pure integer arithmetic on the seed string.

/** 32-bit FNV-1a hash of a string. */
function fnv1a(text: string): number {
  let hash = 0x811c9dc5;
  for (let i = 0; i < text.length; i++) {
    hash ^= text.charCodeAt(i);
    hash = Math.imul(hash, 0x01000193);
  }
  return hash >>> 0;
}

/** xorshift32 step; zero state would be a fixed point, so it is remapped. */
function next(state: { x: number }): number {
  let x = state.x || 0x9e3779b9;
  x ^= (x << 13) >>> 0;
  x ^= x >>> 17;
  x ^= (x << 5) >>> 0;
  state.x = x >>> 0;
  return state.x;
}

const GRID = 5;

/**
 * Render a seed as a 5x5 mirrored block pattern, the classic identicon
 * layout: only the left three columns are drawn from seed bits and the
 * right two mirror them, which keeps every avatar symmetric.
 */
export function avatarSvg(seed: string, size = 40): string {
  const state = { x: fnv1a(seed) };
  const hue = next(state) % 360;
  const fg = `hsl(${hue}, 58%, 44%)`;
  const cell = size / GRID;
  const rects: string[] = [];
  for (let col = 0; col < 3; col++) {
    for (let row = 0; row < GRID; row++) {
      if ((next(state) & 1) === 0) continue;
      const columns = col === 2 ? [col] : [col, GRID - 1 - col];
      for (const c of columns) {
        const x = (c * cell).toFixed(2);
        const y = (row * cell).toFixed(2);
        rects.push(
          `<rect x="${x}" y="${y}" width="${cell.toFixed(2)}" height="${cell.toFixed(2)}"/>`,
        );
      }
    }
  }
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${size} ${size}"` +
    ` width="${size}" height="${size}">` +
    `<rect width="${size}" height="${size}" fill="#eceff1"/>` +
    `<g fill="${fg}">${rects.join("")}</g></svg>`
  );
}

export function avatarDataUri(seed: string, size = 40): string {
  return "data:image/svg+xml;utf8," + encodeURIComponent(avatarSvg(seed, size));
}
