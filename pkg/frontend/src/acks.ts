/**
 * Command acknowledgement bookkeeping: every sent sequence number resolves
 * exactly once, either by ack/error from the server or by local timeout.
 */

export type AckOutcome = "ok" | "rejected" | "timeout";

export interface AckResult {
  seq: number;
  outcome: AckOutcome;
  message?: string;
}

interface Pending {
  seq: number;
  deadline: number;
  label: string;
}

export class PendingCommands {
  private pending = new Map<number, Pending>();
  private settled = new Set<number>();

  constructor(
    private timeoutMs: number,
    private onSettle: (result: AckResult, label: string) => void,
  ) {}

  get open(): number {
    return this.pending.size;
  }

  sent(seq: number, label: string, now: number): void {
    this.pending.set(seq, { seq, deadline: now + this.timeoutMs, label });
  }

  acked(seq: number, ok: boolean, message: string | undefined, _now: number): void {
    const entry = this.pending.get(seq);
    if (!entry || this.settled.has(seq)) return; // late or duplicate ack
    this.pending.delete(seq);
    this.settled.add(seq);
    this.onSettle({ seq, outcome: ok ? "ok" : "rejected", message }, entry.label);
  }

  /** Expire overdue commands; call periodically with a monotonic clock. */
  sweep(now: number): void {
    for (const entry of [...this.pending.values()]) {
      if (now >= entry.deadline) {
        this.pending.delete(entry.seq);
        this.settled.add(entry.seq);
        this.onSettle({ seq: entry.seq, outcome: "timeout" }, entry.label);
      }
    }
  }
}
