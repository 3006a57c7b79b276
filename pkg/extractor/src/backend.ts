/**
 * Generation backend contract.
 *
 * A backend runs one text-conditioned generation and exposes, per transformer
 * layer and denoising timestep, the attention maps with the head axis already
 * reduced by mean: cross-attention as (H, W, P) over prompt tokens and
 * self-attention as (H, W, H, W) with row-stochastic affinity fields. Only
 * the conditional guidance pass is observed.
 */

export interface GenerationRequest {
  prompt: string
  tokens: string[]
  classTokenIndices: number[]
  samplerSeed: number
  timesteps: number
}

export interface AttentionSource {
  /** Identifier recorded in the dump manifest. */
  readonly modelId: string
  /** 512x512 RGB image for the generation, as raw rows (3 bytes per pixel). */
  renderImage(req: GenerationRequest): Uint8Array
  /** Cross-attention map for (layer, timestep): flat (s*s*P) float32. */
  crossAttention(req: GenerationRequest, layer: number, scale: number,
    timestep: number): Float32Array
  /** Self-attention map for (layer, timestep): flat (s*s*s*s) float32. */
  selfAttention(req: GenerationRequest, layer: number, scale: number,
    timestep: number): Float32Array
}
