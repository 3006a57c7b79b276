/** Dump manifest structure shared with the Python consumer. */

export interface TensorEntry {
  kind: 'cross' | 'self'
  scale: number
  layer?: number
  timestep?: number
  path: string
  shape: number[]
}

export interface Manifest {
  prompt: string
  class_token_indices: number[]
  timestep_count: number
  mode: 'aggregated' | 'full'
  scales: number[]
  tensors: TensorEntry[]
  image_path?: string
  generator?: {
    model_id?: string
    sampler_seed?: number
    [extra: string]: unknown
  }
  class_label?: string
  [extra: string]: unknown
}

export function renderManifest (manifest: Manifest): string {
  return JSON.stringify(manifest, null, 2) + '\n'
}
