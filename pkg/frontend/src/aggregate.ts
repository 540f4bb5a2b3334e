import type { TraceRow } from './csv.js'

export interface Series {
  fev: number[]
  value: number[]
}

export interface Band {
  fev: number[]
  median: number[]
  lo: number[]
  hi: number[]
}

export const median = (values: number[]): number => {
  if (values.length === 0) throw new Error('median of empty list')
  const s = [...values].sort((a, b) => a - b)
  const mid = Math.floor(s.length / 2)
  return s.length % 2 === 0 ? (s[mid - 1] + s[mid]) / 2 : s[mid]
}

export type MetricColumn = 'f_full' | 'stationarity' | 'dist_to_ref'

/** The (fev, metric) pairs of one run; rows off the metric cadence are
 * skipped, nonpositive values are dropped (the charts use a log axis). */
export function metricSeries(rows: TraceRow[], column: MetricColumn): Series {
  const fev: number[] = []
  const value: number[] = []
  for (const row of rows) {
    const v = row[column]
    if (v !== null && v > 0) {
      fev.push(row.fev)
      value.push(v)
    }
  }
  if (fev.length === 0) {
    throw new Error(`no positive ${column} values in trace (is the metric populated?)`)
  }
  return { fev, value }
}

const interpolate = (s: Series, x: number): number => {
  if (x <= s.fev[0]) return s.value[0]
  const last = s.fev.length - 1
  if (x >= s.fev[last]) return s.value[last]
  let i = 1
  while (s.fev[i] < x) i++
  const t = (x - s.fev[i - 1]) / (s.fev[i] - s.fev[i - 1])
  return s.value[i - 1] + t * (s.value[i] - s.value[i - 1])
}

/** Pointwise median and min-max envelope of several runs, linearly
 * interpolated onto a common cost grid spanning the overlap of their
 * ranges. */
export function medianBand(seeds: Series[], points = 200): Band {
  if (seeds.length === 0) throw new Error('no series to aggregate')
  const x0 = Math.max(...seeds.map((s) => s.fev[0]))
  const x1 = Math.min(...seeds.map((s) => s.fev[s.fev.length - 1]))
  const grid: number[] = []
  if (x1 <= x0) {
    grid.push(x0)
  } else {
    for (let i = 0; i < points; i++) grid.push(x0 + ((x1 - x0) * i) / (points - 1))
  }
  const med: number[] = []
  const lo: number[] = []
  const hi: number[] = []
  for (const x of grid) {
    const vals = seeds.map((s) => interpolate(s, x))
    med.push(median(vals))
    lo.push(Math.min(...vals))
    hi.push(Math.max(...vals))
  }
  return { fev: grid, median: med, lo, hi }
}
