"""Per-subject brute-force reference for the one-step law.

Every subject is labelled and its fate enumerated explicitly: the M
meetings of each susceptible, which pool members get tested, whether each
tested asymptomatic subject is detected, and where each subject goes.
Subjects act independently given the current state, the same assumption
the closed forms rest on.  Only usable for a handful of subjects.
"""

from collections import defaultdict
from itertools import combinations, product

S_, A_, I_, R_, O_, D_, Q_, RA_ = range(8)


def _meeting_healthy(v, M, p):
    """Probability a susceptible stays healthy, by enumerating its M meetings."""
    pool = v[0] + v[1] + v[3] + v[7]  # S, A, R, Ra circulate
    if M == 0 or v[1] == 0:
        return 1.0
    per = {"infect": v[1] / pool * p.omega,
           "miss": v[1] / pool * (1 - p.omega),
           "other": 1 - v[1] / pool}
    total = 0.0
    for seq in product(per, repeat=M):
        if "infect" in seq:
            continue
        w = 1.0
        for e in seq:
            w *= per[e]
        total += w
    return total


def oracle_distribution(v, M, t, p):
    """Exact next-state law of the full model for state tuple ``v``."""
    v = tuple(v)
    subjects = [c for c, n in enumerate(v) for _ in range(n)]
    n = len(subjects)
    healthy = _meeting_healthy(v, M, p)
    free_beds = p.C - v[O_]

    fates = {
        S_: [(A_, 1 - healthy), (S_, healthy)],
        A_: [(I_, p.delta), (RA_, p.beta), (A_, 1 - p.beta - p.delta)],
        I_: [(R_, p.mu), (O_, p.psi), (D_, p.alpha), (I_, 1 - p.mu - p.psi - p.alpha)],
        O_: [(D_, p.sigma), (R_, p.xi), (O_, 1 - p.sigma - p.xi)],
        Q_: [(I_, p.iota), (R_, p.upsilon), (Q_, 1 - p.iota - p.upsilon)],
        R_: [(R_, 1.0)], D_: [(D_, 1.0)], RA_: [(RA_, 1.0)],
    }
    testable = [k for k in range(n) if subjects[k] in (S_, A_, RA_)]
    subsets = list(combinations(testable, t))
    out = defaultdict(float)
    for tested in subsets:
        w_subset = 1.0 / len(subsets)
        tested_a = [k for k in tested if subjects[k] == A_]
        for detect in product((True, False), repeat=len(tested_a)):
            w_test = w_subset
            for d in detect:
                w_test *= p.gamma if d else 1 - p.gamma
            if w_test == 0:
                continue
            positive = {k for k, d in zip(tested_a, detect) if d}
            for choice in product(*(fates[c] for c in subjects)):
                w = w_test
                for _, q in choice:
                    w *= q
                if w == 0:
                    continue
                dest = [c for c, _ in choice]
                for k in positive:
                    # detected subjects are isolated unless they turn symptomatic
                    if dest[k] != I_:
                        dest[k] = Q_
                # beds are filled up to the free capacity; the rest stay in I
                wanting = [k for k in range(n) if subjects[k] == I_ and dest[k] == O_]
                if len(wanting) > free_beds:
                    _fold(out, subjects, dest, wanting, free_beds, w)
                    continue
                out[_count(dest)] += w
    return dict(out)


def _fold(out, subjects, dest, wanting, free_beds, w):
    # which of the applicants get a bed does not change the counts
    dest = list(dest)
    for k in wanting[free_beds:]:
        dest[k] = I_
    out[_count(dest)] += w


def _count(dest):
    v = [0] * 8
    for c in dest:
        v[c] += 1
    return tuple(v)


def merge(dist):
    """Map a full-model law with Q = 0 onto the six-compartment state."""
    out = defaultdict(float)
    for v, w in dist.items():
        assert v[Q_] == 0
        out[(v[0], v[1], v[2], v[3] + v[7], v[4], v[5])] += w
    return dict(out)
