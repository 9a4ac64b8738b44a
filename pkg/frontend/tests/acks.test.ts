import { describe, expect, it } from "vitest";

import { AckResult, PendingCommands } from "../src/acks.js";

function collector() {
  const settled: { result: AckResult; label: string }[] = [];
  const pending = new PendingCommands(1000, (result, label) => settled.push({ result, label }));
  return { pending, settled };
}

describe("command acknowledgement bookkeeping", () => {
  it("settles once on ack", () => {
    const { pending, settled } = collector();
    pending.sent(1, "set_goal", 0);
    pending.acked(1, true, undefined, 10);
    pending.sweep(5000);
    expect(settled).toHaveLength(1);
    expect(settled[0].result).toEqual({ seq: 1, outcome: "ok", message: undefined });
    expect(settled[0].label).toBe("set_goal");
  });

  it("settles once on timeout and ignores a late ack", () => {
    const { pending, settled } = collector();
    pending.sent(2, "spawn_obstacle", 0);
    pending.sweep(999);
    expect(settled).toHaveLength(0); // not yet due
    pending.sweep(1000);
    expect(settled).toHaveLength(1);
    expect(settled[0].result.outcome).toBe("timeout");
    pending.acked(2, true, undefined, 1200); // late ack: already settled
    expect(settled).toHaveLength(1);
  });

  it("rejections carry the server message", () => {
    const { pending, settled } = collector();
    pending.sent(3, "set_goal", 0);
    pending.acked(3, false, "InvalidTarget: goal in a wall", 5);
    expect(settled[0].result.outcome).toBe("rejected");
    expect(settled[0].result.message).toContain("InvalidTarget");
  });

  it("every sent seq settles exactly once under interleaving", () => {
    const { pending, settled } = collector();
    for (let seq = 1; seq <= 20; seq++) pending.sent(seq, `c${seq}`, seq);
    for (let seq = 1; seq <= 10; seq++) pending.acked(seq, seq % 2 === 0, undefined, seq + 1);
    pending.sweep(10_000);
    expect(settled).toHaveLength(20);
    const seqs = settled.map((s) => s.result.seq).sort((a, b) => a - b);
    expect(seqs).toEqual(Array.from({ length: 20 }, (_, k) => k + 1));
    expect(pending.open).toBe(0);
  });
});
