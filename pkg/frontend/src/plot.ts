import { readFileSync, readdirSync, writeFileSync } from 'fs'
import { join } from 'path'

import { medianBand, metricSeries } from './aggregate.js'
import type { MetricColumn, Series } from './aggregate.js'
import { parseTraceCsv } from './csv.js'
import { renderChart } from './svg.js'
import type { Curve } from './svg.js'

export type FigureKind = 'distance' | 'loss' | 'stationarity'

export const FIGURE_KINDS: FigureKind[] = ['distance', 'loss', 'stationarity']

const KIND_COLUMN: Record<FigureKind, MetricColumn> = {
  distance: 'dist_to_ref',
  loss: 'f_full',
  stationarity: 'stationarity',
}

const KIND_YLABEL: Record<FigureKind, string> = {
  distance: 'distance to reference solution',
  loss: 'objective value',
  stationarity: 'stationarity measure',
}

// legend order and labels are fixed across figures
const METHODS: { id: string; label: string; color: string }[] = [
  { id: 'asbox', label: 'AS-BOX', color: '#1f77b4' },
  { id: 'sipm', label: 'SIPM', color: '#2ca02c' },
  { id: 'psgm', label: 'PSGM', color: '#d62728' },
]

export function collectTraces(tracesDir: string): Map<string, Series[]>
export function collectTraces(tracesDir: string, column: MetricColumn): Map<string, Series[]>
export function collectTraces(tracesDir: string, column?: MetricColumn): Map<string, Series[]> {
  const files = readdirSync(tracesDir)
    .filter((f) => /^[a-z]+_seed-?\d+\.csv$/.test(f))
    .sort()
  if (files.length === 0) throw new Error(`no trace files in ${tracesDir}`)
  const byMethod = new Map<string, Series[]>()
  for (const file of files) {
    const method = file.split('_seed')[0]
    const rows = parseTraceCsv(readFileSync(join(tracesDir, file), 'utf8'))
    const series = metricSeries(rows, column ?? 'stationarity')
    const list = byMethod.get(method) ?? []
    list.push(series)
    byMethod.set(method, list)
  }
  return byMethod
}

export function renderFigureSvg(tracesDir: string, kind: FigureKind): string {
  if (!FIGURE_KINDS.includes(kind)) {
    throw new Error(`unknown figure kind ${JSON.stringify(kind)}; ` +
      `expected one of ${FIGURE_KINDS.join(', ')}`)
  }
  const byMethod = collectTraces(tracesDir, KIND_COLUMN[kind])
  const curves: Curve[] = []
  for (const m of METHODS) {
    const seeds = byMethod.get(m.id)
    if (!seeds) continue
    curves.push({
      label: m.label,
      color: m.color,
      band: medianBand(seeds),
      showBand: seeds.length > 1,
    })
  }
  if (curves.length === 0) {
    const found = [...byMethod.keys()].join(', ') || 'none'
    throw new Error(`no known methods among traces (found: ${found})`)
  }
  return renderChart({
    xLabel: 'FEV (scalar products)',
    yLabel: KIND_YLABEL[kind],
    curves,
  })
}

async function svgToPng(svg: string): Promise<Buffer> {
  let resvg
  try {
    resvg = await import('@resvg/resvg-js')
  } catch {
    throw new Error('PNG output needs the optional @resvg/resvg-js package; ' +
      'install it or write .svg instead')
  }
  return new resvg.Resvg(svg).render().asPng()
}

export async function renderFigure(tracesDir: string, kind: FigureKind,
                                   outPath: string): Promise<void> {
  const svg = renderFigureSvg(tracesDir, kind)
  if (outPath.endsWith('.png')) {
    writeFileSync(outPath, await svgToPng(svg))
  } else if (outPath.endsWith('.svg')) {
    writeFileSync(outPath, svg)
  } else {
    throw new Error(`output path must end in .svg or .png, got ${outPath}`)
  }
}
