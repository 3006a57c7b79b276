/**
 * Extraction orchestrator.
 *
 * Drives one text-conditioned generation through a backend, observing every
 * cross/self-attention map across all 16 transformer blocks and all
 * timesteps. Aggregated mode streams the per-scale reduction online and
 * stores only four map pairs; full mode stores each raw map. The dump is
 * written to a temp directory and renamed into place so consumers never see
 * a partial dump.
 */

import { mkdirSync, mkdtempSync, renameSync, rmSync, writeFileSync } from 'node:fs'
import { dirname, join, resolve } from 'node:path'

import { writeTensor } from './atnb.js'
import type { AttentionSource, GenerationRequest } from './backend.js'
import { StreamingAggregator } from './aggregate.js'
import type { Manifest, TensorEntry } from './manifest.js'
import { renderManifest } from './manifest.js'
import { encodePng } from './png.js'
import { ProceduralSource } from './procedural.js'
import { buildPrompt, tokenIndices, tokenize } from './tokenizer.js'
import { LAYER_SCALES, SCALES } from './topology.js'

export interface ExtractOptions {
  className: string
  template?: string
  samplerSeed?: number
  timesteps?: number
  mode?: 'aggregated' | 'full'
  /** Restrict captured scales (full mode only); aggregated always keeps all. */
  fullScales?: number[]
  outDir: string
  source?: AttentionSource
}

export const DEFAULT_TEMPLATE = 'a photo of a {}'

export function extract (options: ExtractOptions): string {
  const template = options.template ?? DEFAULT_TEMPLATE
  const mode = options.mode ?? 'aggregated'
  const timesteps = options.timesteps ?? 50
  const samplerSeed = options.samplerSeed ?? 0
  const source = options.source ?? new ProceduralSource()

  const prompt = buildPrompt(template, options.className)
  const tokens = tokenize(prompt)
  const req: GenerationRequest = {
    prompt,
    tokens,
    classTokenIndices: tokenIndices(prompt, options.className),
    samplerSeed,
    timesteps,
  }

  const outDir = resolve(options.outDir)
  mkdirSync(dirname(outDir), { recursive: true })
  const tmpDir = mkdtempSync(outDir + '.tmp-')
  try {
    const tensors = mode === 'aggregated'
      ? streamAggregated(source, req, tmpDir)
      : storeFull(source, req, tmpDir, options.fullScales ?? [16])

    writeFileSync(join(tmpDir, 'image.png'),
      encodePng(source.renderImage(req), 512, 512, 3))

    const manifest: Manifest = {
      prompt,
      class_token_indices: req.classTokenIndices,
      timestep_count: timesteps,
      mode,
      scales: [...new Set(tensors.map(t => t.scale))].sort((a, b) => a - b),
      tensors,
      image_path: 'image.png',
      generator: {
        model_id: source.modelId,
        sampler_seed: samplerSeed,
        head_reduction: 'mean',
        guidance_pass: 'conditional',
      },
      class_label: options.className,
    }
    writeFileSync(join(tmpDir, 'manifest.json'), renderManifest(manifest))
    rmSync(outDir, { recursive: true, force: true })
    renameSync(tmpDir, outDir)
  } catch (err) {
    rmSync(tmpDir, { recursive: true, force: true })
    throw err
  }
  return outDir
}

function streamAggregated (source: AttentionSource, req: GenerationRequest,
  dir: string): TensorEntry[] {
  mkdirSync(join(dir, 'tensors'), { recursive: true })
  const ca = new Map<number, StreamingAggregator>()
  const sa = new Map<number, StreamingAggregator>()
  for (const s of SCALES) {
    ca.set(s, new StreamingAggregator())
    sa.set(s, new StreamingAggregator())
  }
  for (let t = 1; t <= req.timesteps; t++) {
    LAYER_SCALES.forEach((scale, i) => {
      const layer = i + 1
      ca.get(scale)!.add(source.crossAttention(req, layer, scale, t))
      sa.get(scale)!.add(source.selfAttention(req, layer, scale, t))
    })
  }
  const tensors: TensorEntry[] = []
  const P = req.tokens.length
  for (const s of SCALES) {
    const caEntry: TensorEntry = {
      kind: 'cross',
      scale: s,
      path: `tensors/ca_s${s}.atnb`,
      shape: [s, s, P],
    }
    writeTensor({ shape: caEntry.shape, data: ca.get(s)!.finish() },
      join(dir, caEntry.path))
    const saEntry: TensorEntry = {
      kind: 'self',
      scale: s,
      path: `tensors/sa_s${s}.atnb`,
      shape: [s, s, s, s],
    }
    writeTensor({ shape: saEntry.shape, data: sa.get(s)!.finish() },
      join(dir, saEntry.path))
    tensors.push(caEntry, saEntry)
  }
  return tensors
}

function storeFull (source: AttentionSource, req: GenerationRequest,
  dir: string, scales: number[]): TensorEntry[] {
  mkdirSync(join(dir, 'tensors'), { recursive: true })
  const keep = new Set(scales)
  const tensors: TensorEntry[] = []
  const P = req.tokens.length
  for (let t = 1; t <= req.timesteps; t++) {
    LAYER_SCALES.forEach((scale, i) => {
      if (!keep.has(scale)) return
      const layer = i + 1
      const entries: TensorEntry[] = [
        {
          kind: 'cross',
          scale,
          layer,
          timestep: t,
          path: `tensors/ca_s${scale}_l${layer}_t${t}.atnb`,
          shape: [scale, scale, P],
        },
        {
          kind: 'self',
          scale,
          layer,
          timestep: t,
          path: `tensors/sa_s${scale}_l${layer}_t${t}.atnb`,
          shape: [scale, scale, scale, scale],
        },
      ]
      writeTensor({ shape: entries[0].shape, data: source.crossAttention(req, layer, scale, t) },
        join(dir, entries[0].path))
      writeTensor({ shape: entries[1].shape, data: source.selfAttention(req, layer, scale, t) },
        join(dir, entries[1].path))
      tensors.push(...entries)
    })
  }
  return tensors
}
