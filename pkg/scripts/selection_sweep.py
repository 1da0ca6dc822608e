"""Planted-recall sweep for cross-entropy difference selection.

Builds a pool of out-domain pairs with a known share of planted in-domain
pairs, scores it, and prints recall and precision of the planted pairs at
each selection fraction. Two ways of training the out-domain scoring LMs
are compared: a held-out sample of the pool distribution, and a sample
drawn from the pool itself (the usual recipe, which lets the out-domain LM
memorize some planted pairs).
"""

import argparse
import random

from adaptkit.selection import SWEEP_FRACTIONS, score_corpus, select_fraction, train_scoring_lms
from adaptkit.synthetic import generate_pair, make_lexicon
from adaptkit.text import SentencePair, normalize, tokenize


def build(args):
    lex = make_lexicon(args.seed)
    rng = random.Random(args.seed + 1)

    def pair(domain):
        src, tgt, _ = generate_pair(lex, domain, rng)
        return tokenize(normalize(" ".join(src))), tgt

    in_domain = [pair("in") for _ in range(args.in_size)]
    n_planted = round(args.pool * args.planted)
    pool = [(pair("in"), True) for _ in range(n_planted)] + \
           [(pair("out"), False) for _ in range(args.pool - n_planted)]
    random.Random(args.seed).shuffle(pool)
    held_out = [pair("in" if rng.random() < args.planted else "out") for _ in range(args.in_size)]
    from_pool = [p for p, _ in random.Random(args.seed + 2).sample(pool, args.in_size)]
    return in_domain, pool, {"held-out": held_out, "from-pool": from_pool}


def sweep(in_domain, pool, out_sample, order):
    in_src, out_src = train_scoring_lms([s for s, _ in in_domain], [s for s, _ in out_sample], order)
    in_tgt, out_tgt = train_scoring_lms([t for _, t in in_domain], [t for _, t in out_sample], order)
    scores = score_corpus([SentencePair(s, t) for (s, t), _ in pool], in_src, out_src, in_tgt, out_tgt)
    planted = {i for i, (_, flag) in enumerate(pool) if flag}
    for f in SWEEP_FRACTIONS:
        chosen = set(select_fraction(scores, f))
        hit = len(chosen & planted)
        yield f, len(chosen), hit / len(planted), hit / max(1, len(chosen))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--pool", type=int, default=10_000)
    ap.add_argument("--planted", type=float, default=0.1)
    ap.add_argument("--in-size", type=int, default=1000)
    ap.add_argument("--order", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    in_domain, pool, samples = build(args)
    print("out_lm\tfraction\tselected\trecall\tprecision")
    for name, sample in samples.items():
        for f, n, recall, precision in sweep(in_domain, pool, sample, args.order):
            print(f"{name}\t{f}\t{n}\t{recall:.3f}\t{precision:.3f}")


if __name__ == "__main__":
    main()
