"""How plans become token sequences (and come back).

A plan serializes segment by segment: BOS, then the boundary, the door,
each room in order, then EOS. Every segment is a start token followed by
interleaved x/y coordinates. Alongside the ids run two index streams the
model embeds separately: which axis a coordinate belongs to, and which
vertex pair it is part of.
"""

from ergoplan.dataset import synth_plan
from ergoplan.tokenizer import Vocabulary, decode, encode

vocab = Vocabulary(256)
print(f"vocabulary: {vocab.size} ids = 256 coordinates + 2 segment starts "
      "+ 13 room types + BOS/EOS/PAD")

plan = synth_plan(5)
seq = encode(plan, vocab)
print(f"\nplan with {len(plan.rooms)} rooms -> {len(seq)} tokens")
print(f"{'pos':>4} {'token':>6} {'meaning':<14} {'xy':>3} {'vertex':>6}")
for pos in range(min(len(seq), 24)):
    print(
        f"{pos:>4} {seq.tokens[pos]:>6} {vocab.describe(seq.tokens[pos]):<14} "
        f"{seq.xy_index[pos]:>3} {seq.vertex_index[pos]:>6}"
    )
print("  ...")

outcome = decode(seq, vocab)
assert outcome.ok and outcome.plan == plan
print("\ndecode(encode(plan)) == plan")

# Decoding never throws; ill-formed streams produce positioned failures.
broken = list(seq.tokens)
del broken[len(broken) // 2]
outcome = decode(broken, vocab)
print(f"corrupted stream -> parse failure at {outcome.position}: {outcome.reason}")

garbage = [vocab.bos, 3, 1, 4, 1, 5, vocab.eos]
outcome = decode(garbage, vocab)
print(f"garbage stream   -> parse failure at {outcome.position}: {outcome.reason}")
