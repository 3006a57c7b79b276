/**
 * Deterministic procedural backend.
 *
 * Stands in for a hooked diffusion model where real inference is not
 * available: it invents a class-dependent blob, renders it into the output
 * image, and emits attention maps with the same shapes, value ranges, and
 * row-stochastic structure a hooked model produces. Self-attention couples
 * cells through within-object / within-background affinities (softmax rows,
 * per-map temperature jitter); cross-attention concentrates the class-token
 * channels on a sparse subset of object cells at the seeding scale and
 * spreads them with extra diffuse mass at finer scales.
 */

import type { AttentionSource, GenerationRequest } from './backend.js'
import { uniform, uniformIn } from './rng.js'

const BASE_GRID = 64
const SEED_SCALE = 16

function classHash (req: GenerationRequest): number {
  let h = 0
  for (const i of req.classTokenIndices) {
    const word = req.tokens[i]
    for (let k = 0; k < word.length; k++) h = (Math.imul(h, 31) + word.charCodeAt(k)) | 0
  }
  return h >>> 0
}

/** Object membership on the 64x64 base grid: an ellipse-ish blob. */
export function objectMembership (req: GenerationRequest): Float64Array {
  const seed = req.samplerSeed
  const h = classHash(req)
  const cr = uniformIn(24, 40, seed ^ h, 'center-row')
  const cc = uniformIn(24, 40, seed ^ h, 'center-col')
  const ra = uniformIn(12, 20, seed ^ h, 'radius-a')
  const rb = uniformIn(12, 20, seed ^ h, 'radius-b')
  const theta = uniformIn(0, Math.PI, seed ^ h, 'angle')
  const cos = Math.cos(theta)
  const sin = Math.sin(theta)
  const membership = new Float64Array(BASE_GRID * BASE_GRID)
  for (let r = 0; r < BASE_GRID; r++) {
    for (let c = 0; c < BASE_GRID; c++) {
      const dr = r - cr
      const dc = c - cc
      const u = (dr * cos + dc * sin) / ra
      const v = (-dr * sin + dc * cos) / rb
      membership[r * BASE_GRID + c] = u * u + v * v <= 1 ? 1 : 0
    }
  }
  return membership
}

/** Block-mean the base membership down to `scale`. */
export function membershipAt (base: Float64Array, scale: number): Float64Array {
  const f = BASE_GRID / scale
  const out = new Float64Array(scale * scale)
  for (let r = 0; r < scale; r++) {
    for (let c = 0; c < scale; c++) {
      let acc = 0
      for (let i = 0; i < f; i++) {
        for (let j = 0; j < f; j++) {
          acc += base[(r * f + i) * BASE_GRID + (c * f + j)]
        }
      }
      out[r * scale + c] = acc / (f * f)
    }
  }
  return out
}

const WITHIN_OBJECT = 8.0
const WITHIN_BACKGROUND = 8.0

export class ProceduralSource implements AttentionSource {
  readonly modelId = 'procedural-attention-sim-v1'

  private memberships = new Map<string, Float64Array>()

  private membership (req: GenerationRequest, scale: number): Float64Array {
    const key = `${req.samplerSeed}:${req.prompt}:${scale}`
    let mu = this.memberships.get(key)
    if (!mu) {
      mu = membershipAt(objectMembership(req), scale)
      this.memberships.set(key, mu)
    }
    return mu
  }

  renderImage (req: GenerationRequest): Uint8Array {
    const mu = this.membership(req, BASE_GRID)
    const h = classHash(req)
    const tint = [96 + (h % 96), 64 + ((h >> 7) % 128), 80 + ((h >> 14) % 96)]
    const bg = [214, 211, 206]
    const rows = new Uint8Array(512 * 512 * 3)
    for (let y = 0; y < 512; y++) {
      for (let x = 0; x < 512; x++) {
        const m = mu[(y >> 3) * BASE_GRID + (x >> 3)]
        for (let ch = 0; ch < 3; ch++) {
          rows[(y * 512 + x) * 3 + ch] = Math.round(bg[ch] + (tint[ch] - bg[ch]) * m)
        }
      }
    }
    return rows
  }

  selfAttention (req: GenerationRequest, layer: number, scale: number,
    timestep: number): Float32Array {
    const mu = this.membership(req, scale)
    const n = scale * scale
    const gain = uniformIn(0.75, 1.25, req.samplerSeed, 'sa-gain', layer, timestep)
    const out = new Float32Array(n * n)
    if (scale === BASE_GRID) {
      // crisp membership: only two distinct softmax rows, so build each once
      const objRow = new Float64Array(n)
      const bgRow = new Float64Array(n)
      let zObj = 0
      let zBg = 0
      for (let q = 0; q < n; q++) {
        const eo = Math.exp(gain * WITHIN_OBJECT * mu[q])
        const eb = Math.exp(gain * WITHIN_BACKGROUND * (1 - mu[q]))
        zObj += eo
        zBg += eb
        objRow[q] = eo
        bgRow[q] = eb
      }
      const objF = new Float32Array(n)
      const bgF = new Float32Array(n)
      for (let q = 0; q < n; q++) {
        objF[q] = objRow[q] / zObj
        bgF[q] = bgRow[q] / zBg
      }
      for (let p = 0; p < n; p++) {
        out.set(mu[p] >= 0.5 ? objF : bgF, p * n)
      }
      return out
    }
    for (let p = 0; p < n; p++) {
      const fp = mu[p]
      let z = 0
      const row = new Float64Array(n)
      for (let q = 0; q < n; q++) {
        const fq = mu[q]
        const logit = gain * (WITHIN_OBJECT * fp * fq +
          WITHIN_BACKGROUND * (1 - fp) * (1 - fq))
        const e = Math.exp(logit)
        row[q] = e
        z += e
      }
      for (let q = 0; q < n; q++) out[p * n + q] = row[q] / z
    }
    return out
  }

  crossAttention (req: GenerationRequest, layer: number, scale: number,
    timestep: number): Float32Array {
    const mu = this.membership(req, scale)
    const n = scale * scale
    const P = req.tokens.length
    const isClass = new Set(req.classTokenIndices)
    const seed = req.samplerSeed
    const jitter = uniformIn(0.8, 1.2, seed, 'ca-gain', layer, timestep)
    // diffuse share grows at finer scales: high-res CA attends more uniformly
    const diffuse = scale <= SEED_SCALE ? 0.05 : scale === 32 ? 0.25 : 0.45
    const out = new Float32Array(n * P)
    for (let p = 0; p < n; p++) {
      let sum = 0
      for (let tok = 0; tok < P; tok++) {
        let v: number
        if (tok === 0 || tok === P - 1) {
          v = 1.0 // start/end tokens soak up most attention mass
        } else if (isClass.has(tok)) {
          const hot = scale === SEED_SCALE
            ? (mu[p] >= 0.6 && uniform(seed, 'ca-hot', p) < 0.5 ? 1 : 0)
            : mu[p]
          v = jitter * (0.12 + 1.4 * hot + diffuse * uniform(seed, 'ca-noise', layer, timestep, p, tok))
        } else {
          v = 0.12 + 0.1 * uniform(seed, 'ca-filler', layer, timestep, p, tok)
        }
        out[p * P + tok] = v
        sum += v
      }
      for (let tok = 0; tok < P; tok++) out[p * P + tok] /= sum
    }
    return out
  }
}
