/**
 * Counter-based deterministic randomness.
 *
 * Every draw is a pure hash of (seed, tag, counters), so the stream a
 * consumer sees never depends on evaluation order or on which maps a mode
 * chooses to materialize. That is what makes streaming and full capture
 * modes byte-comparable for the same seed.
 */

function mix (h: number, v: number): number {
  h = Math.imul(h ^ v, 0x9e3779b1)
  h = (h << 13) | (h >>> 19)
  return Math.imul(h, 5) + 0xe6546b64 | 0
}

function hashToUint (seed: number, tag: string, ...counters: number[]): number {
  let h = seed | 0
  for (let i = 0; i < tag.length; i++) h = mix(h, tag.charCodeAt(i))
  for (const c of counters) h = mix(h, c | 0)
  h ^= h >>> 16
  h = Math.imul(h, 0x85ebca6b)
  h ^= h >>> 13
  h = Math.imul(h, 0xc2b2ae35)
  h ^= h >>> 16
  return h >>> 0
}

/** Uniform in [0, 1). */
export function uniform (seed: number, tag: string, ...counters: number[]): number {
  return hashToUint(seed, tag, ...counters) / 4294967296
}

export function uniformIn (lo: number, hi: number, seed: number, tag: string,
  ...counters: number[]): number {
  return lo + (hi - lo) * uniform(seed, tag, ...counters)
}
