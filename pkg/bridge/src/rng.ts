/** SplitMix64 over BigInt state; deterministic across platforms. */

const MASK = (1n << 64n) - 1n;

export class Rng {
  private state: bigint;

  constructor(seed: number | bigint) {
    this.state = BigInt(seed) & MASK;
  }

  nextU64(): bigint {
    this.state = (this.state + 0x9e3779b97f4a7c15n) & MASK;
    let z = this.state;
    z = ((z ^ (z >> 30n)) * 0xbf58476d1ce4e5b9n) & MASK;
    z = ((z ^ (z >> 27n)) * 0x94d049bb133111ebn) & MASK;
    return z ^ (z >> 31n);
  }

  /** Uniform float in [0, 1) from the top 53 bits. */
  next(): number {
    return Number(this.nextU64() >> 11n) / 2 ** 53;
  }

  below(n: number): number {
    if (n <= 0) throw new Error("below() needs n > 0");
    const bound = (1n << 64n) / BigInt(n) * BigInt(n);
    for (;;) {
      const x = this.nextU64();
      if (x < bound) return Number(x % BigInt(n));
    }
  }

  /** Standard normal via Box-Muller. */
  normal(): number {
    let u = 0;
    while (u === 0) u = this.next();
    const v = this.next();
    return Math.sqrt(-2 * Math.log(u)) * Math.cos(2 * Math.PI * v);
  }
}
