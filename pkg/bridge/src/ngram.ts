/** Add-k n-gram scorer for the logprob op, trained from a corpus file. */

const BOS = "<s>";
const EOS = "</s>";
const PROB_FLOOR = 1e-8;

export class NGramLM {
  readonly order: number;
  readonly k: number;
  private counts = new Map<string, Map<string, number>>();
  private totals = new Map<string, number>();
  private vocab = new Set<string>();

  constructor(order = 3, k = 0.01) {
    this.order = order;
    this.k = k;
  }

  train(sequences: string[][]): void {
    for (const seq of sequences) {
      const padded = [...Array(this.order - 1).fill(BOS), ...seq, EOS];
      for (const tok of seq) this.vocab.add(tok);
      this.vocab.add(EOS);
      for (let i = this.order - 1; i < padded.length; i++) {
        const ctx = padded.slice(i - this.order + 1, i).join("\x1f");
        let row = this.counts.get(ctx);
        if (!row) {
          row = new Map();
          this.counts.set(ctx, row);
        }
        row.set(padded[i], (row.get(padded[i]) ?? 0) + 1);
        this.totals.set(ctx, (this.totals.get(ctx) ?? 0) + 1);
      }
    }
  }

  get trained(): boolean {
    return this.vocab.size > 0;
  }

  logprob(prefix: string[], token: string): number {
    const padded = [...Array(this.order - 1).fill(BOS), ...prefix];
    const ctx = padded.slice(padded.length - this.order + 1).join("\x1f");
    const num = (this.counts.get(ctx)?.get(token) ?? 0) + this.k;
    const den = (this.totals.get(ctx) ?? 0) + this.k * this.vocab.size;
    const p = Math.min(Math.max(num / den, PROB_FLOOR), 1 - PROB_FLOOR);
    return Math.log(p);
  }
}

export function tokenizeLine(text: string): string[] {
  return text
    .toLowerCase()
    .split(/\s+/)
    .filter((t) => t.length > 0);
}
