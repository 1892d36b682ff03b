"""Jitted kernels: search RNG, evaluation, archive updates, the PLS loop,
and enumeration/verification scans.

Solutions are bit strings packed into int64: bit j of the integer holds
variable j, so flipping variable j is ``x ^ (1 << j)``.

The search stream is SplitMix64 (gamma 0x9E3779B97F4A7C15, mixers
0xBF58476D1CE4E5B9 and 0x94D049BB133111EB), seeded directly with the run
seed.  Bounded draws use masked rejection, which is unbiased and consumes a
deterministic (input-dependent) number of raw draws.  ``rmnkpls.rng`` holds
the pure-Python mirror of the same stream.
"""

import numpy as np
from numba import njit

from ._hv import exclusive_contribution

# archiver codes shared with the python layer
ARCHIVER_UNB = 0
ARCHIVER_HVA = 1
ARCHIVER_MGA = 2

GRID_DEPTH = 30  # MGA discretization: floor(v * 2**30) per coordinate

# meta slots for the archive / run state vector
META_COUNT = 0
META_NEXT_INS = 1
META_LENGTH = 2
META_INITIALIZED = 3
META_SIZE = 4


@njit(cache=True)
def next_u64(state):
    state[0] = state[0] + np.uint64(0x9E3779B97F4A7C15)
    z = state[0]
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


@njit(cache=True)
def rand_below(state, bound):
    """Uniform int64 in [0, bound) by masked rejection."""
    b = np.uint64(bound - 1)
    mask = np.uint64(1)
    while mask < b:
        mask = (mask << np.uint64(1)) | np.uint64(1)
    while True:
        r = next_u64(state) & mask
        if r <= b:
            return np.int64(r)


@njit(cache=True)
def shuffle(state, arr):
    """Fisher-Yates; one draw per position from n-1 down to 1."""
    for i in range(arr.shape[0] - 1, 0, -1):
        j = rand_below(state, i + 1)
        tmp = arr[i]
        arr[i] = arr[j]
        arr[j] = tmp


@njit(cache=True)
def eval_into(tables, links, x, out):
    """Objective vector of solution x: mean of component-table entries.

    Table row index packs the k+1 bits as (own, partner_1, ..., partner_k)
    with the own bit most significant.
    """
    m = tables.shape[0]
    n = tables.shape[1]
    k = links.shape[1]
    for i in range(m):
        out[i] = 0.0
    for j in range(n):
        idx = ((x >> j) & 1) << k
        for t in range(k):
            idx |= ((x >> links[j, t]) & 1) << (k - 1 - t)
        for i in range(m):
            out[i] += tables[i, j, idx]
    for i in range(m):
        out[i] /= n


@njit(cache=True)
def enumerate_into(tables, links, out):
    for p in range(out.shape[0]):
        eval_into(tables, links, np.int64(p), out[p])


# ---------------------------------------------------------------------------
# archive update (mu+1 step, shared by the python ops and the PLS loop)
# ---------------------------------------------------------------------------


@njit(cache=True)
def _remove_row(sols, objs, visited, ins, contribs, stale, count, r):
    m = objs.shape[1]
    for i in range(r, count - 1):
        sols[i] = sols[i + 1]
        for d in range(m):
            objs[i, d] = objs[i + 1, d]
        visited[i] = visited[i + 1]
        ins[i] = ins[i + 1]
        contribs[i] = contribs[i + 1]
        stale[i] = stale[i + 1]
    return count - 1


@njit(cache=True)
def _hva_refresh_after_insert(objs, contribs, count):
    """Row count-1 was appended; recompute the contributions it invalidates.

    The contribution of row i is untouched when min(new, a_i) is weakly
    dominated by some existing min(a_j, a_i): the reduced clip set is then
    unchanged, so a recomputation would return the identical value.
    """
    m = objs.shape[1]
    new = count - 1
    qc = np.empty(m, dtype=np.float64)
    for i in range(new):
        for d in range(m):
            qc[d] = min(objs[new, d], objs[i, d])
        skip = False
        for j in range(new):
            if j == i:
                continue
            ge = True
            for d in range(m):
                if min(objs[j, d], objs[i, d]) < qc[d]:
                    ge = False
                    break
            if ge:
                skip = True
                break
        if not skip:
            contribs[i] = exclusive_contribution(objs, count, i)
    contribs[new] = exclusive_contribution(objs, count, new)


@njit(cache=True)
def _hva_remove_row(sols, objs, visited, ins, contribs, stale, count, r):
    """Remove row r and recompute the contributions its clip was shaping."""
    m = objs.shape[1]
    qr = np.empty(m, dtype=np.float64)
    for i in range(count):
        stale[i] = False
    for i in range(count):
        if i == r:
            continue
        for d in range(m):
            qr[d] = min(objs[r, d], objs[i, d])
        skip = False
        for j in range(count):
            if j == i or j == r:
                continue
            ge = True
            for d in range(m):
                if min(objs[j, d], objs[i, d]) < qr[d]:
                    ge = False
                    break
            if ge:
                skip = True
                break
        stale[i] = not skip
    count = _remove_row(sols, objs, visited, ins, contribs, stale, count, r)
    for i in range(count):
        if stale[i]:
            contribs[i] = exclusive_contribution(objs, count, i)
            stale[i] = False
    return count


@njit(cache=True)
def _pick_min_contributor(objs, contribs, ins, count):
    """Smallest contribution; ties by lexicographically smallest vector,
    then smallest insertion index (unreachable while vectors are distinct)."""
    m = objs.shape[1]
    best = 0
    for i in range(1, count):
        if contribs[i] < contribs[best]:
            best = i
        elif contribs[i] == contribs[best]:
            cmp = 0
            for d in range(m):
                if objs[i, d] != objs[best, d]:
                    cmp = -1 if objs[i, d] < objs[best, d] else 1
                    break
            if cmp < 0 or (cmp == 0 and ins[i] < ins[best]):
                best = i
    return best


@njit(cache=True)
def _grid_any_covered(grid, count, level):
    m = grid.shape[1]
    for i in range(count):
        for j in range(count):
            if j == i:
                continue
            cov = True
            for d in range(m):
                if (grid[j, d] >> level) < (grid[i, d] >> level):
                    cov = False
                    break
            if cov:
                return True
    return False


@njit(cache=True)
def _mga_resolve(objs, ins, count, cand_row, grid):
    """Critical-level box coverage decision: (reject_candidate, victim_row).

    Halving box coordinates preserves componentwise order, so coverage is
    monotone in the level and the smallest level with a covered point can be
    located by binary search.  At level GRID_DEPTH every box is the zero
    vector, so a covered point always exists.
    """
    m = objs.shape[1]
    for i in range(count):
        for d in range(m):
            grid[i, d] = np.int64(objs[i, d] * 1073741824.0)
    lo = 0
    hi = GRID_DEPTH
    while lo < hi:
        mid = (lo + hi) // 2
        if _grid_any_covered(grid, count, mid):
            hi = mid
        else:
            lo = mid + 1
    level = lo
    victim = -1
    for i in range(count):
        covered = False
        for j in range(count):
            if j == i:
                continue
            cov = True
            for d in range(m):
                if (grid[j, d] >> level) < (grid[i, d] >> level):
                    cov = False
                    break
            if cov:
                covered = True
                break
        if covered:
            if i == cand_row:
                return True, -1
            if victim == -1 or ins[i] < ins[victim]:
                victim = i
    return False, victim


@njit(cache=True)
def archive_add(
    sols,
    objs,
    visited,
    ins,
    contribs,
    stale,
    grid,
    meta,
    archiver,
    mu,
    cand_sol,
    cand_obj,
    rem_sols,
    rem_objs,
    rem_visited,
    rem_ins,
):
    """One archiver step. Returns (accepted, removed_count).

    The candidate is rejected when weakly dominated by (or equal to) an
    entry.  Otherwise it enters unvisited, entries it dominates are removed,
    and a bounded policy evicts one entry (possibly the candidate itself,
    which restores the archive) whenever the count reaches mu + 1.  Removed
    entries are copied into the rem_* buffers.
    """
    m = objs.shape[1]
    count = meta[META_COUNT]
    for i in range(count):
        wd = True
        for d in range(m):
            if objs[i, d] < cand_obj[d]:
                wd = False
                break
        if wd:
            return False, 0
    removed = 0
    i = 0
    while i < count:
        dom = True
        strict = False
        for d in range(m):
            if objs[i, d] > cand_obj[d]:
                dom = False
                break
            if objs[i, d] < cand_obj[d]:
                strict = True
        if dom and strict:
            rem_sols[removed] = sols[i]
            for d in range(m):
                rem_objs[removed, d] = objs[i, d]
            rem_visited[removed] = visited[i]
            rem_ins[removed] = ins[i]
            removed += 1
            if archiver == ARCHIVER_HVA:
                count = _hva_remove_row(sols, objs, visited, ins, contribs, stale, count, i)
            else:
                count = _remove_row(sols, objs, visited, ins, contribs, stale, count, i)
        else:
            i += 1
    sols[count] = cand_sol
    for d in range(m):
        objs[count, d] = cand_obj[d]
    visited[count] = False
    ins[count] = meta[META_NEXT_INS]
    meta[META_NEXT_INS] += 1
    count += 1
    if archiver == ARCHIVER_HVA:
        _hva_refresh_after_insert(objs, contribs, count)
    if mu > 0 and count > mu:
        # the overflow is exactly one entry: a dominated removal above would
        # have kept the count at mu
        if archiver == ARCHIVER_HVA:
            victim = _pick_min_contributor(objs, contribs, ins, count)
        else:
            reject_cand, victim = _mga_resolve(objs, ins, count, count - 1, grid)
            if reject_cand:
                victim = count - 1
        discard_candidate = victim == count - 1
        if not discard_candidate:
            rem_sols[removed] = sols[victim]
            for d in range(m):
                rem_objs[removed, d] = objs[victim, d]
            rem_visited[removed] = visited[victim]
            rem_ins[removed] = ins[victim]
            removed += 1
        if archiver == ARCHIVER_HVA:
            count = _hva_remove_row(sols, objs, visited, ins, contribs, stale, count, victim)
        else:
            count = _remove_row(sols, objs, visited, ins, contribs, stale, count, victim)
        meta[META_COUNT] = count
        if discard_candidate:
            return False, removed
        return True, removed
    meta[META_COUNT] = count
    return True, removed


# ---------------------------------------------------------------------------
# the PLS loop (resumable so the caller can grow arrays and take snapshots)
# ---------------------------------------------------------------------------


@njit(cache=True)
def pls_segment(
    lookup,
    tables,
    links,
    n,
    sols,
    objs,
    visited,
    ins,
    contribs,
    stale,
    grid,
    meta,
    rem_sols,
    rem_objs,
    rem_visited,
    rem_ins,
    rng_state,
    archiver,
    mu,
    iter_budget,
):
    """Run PLS iterations; stops at termination, budget, or array pressure.

    Returns 0 once every entry is visited, 1 when iter_budget ran out with
    unvisited entries left, 2 when the caller must grow the archive arrays
    (checked at iteration boundaries: one iteration adds at most n entries).

    RNG order: the initial-solution draw first, then per iteration one
    selection draw followed by the neighbor-shuffle draws.
    """
    m = objs.shape[1]
    use_lookup = lookup.shape[0] > 0
    obj_buf = np.empty(m, dtype=np.float64)
    nb = np.empty(n, dtype=np.int64)
    if meta[META_INITIALIZED] == 0:
        s0 = rand_below(rng_state, np.int64(1) << n)
        if use_lookup:
            for d in range(m):
                obj_buf[d] = lookup[s0, d]
        else:
            eval_into(tables, links, s0, obj_buf)
        sols[0] = s0
        for d in range(m):
            objs[0, d] = obj_buf[d]
        visited[0] = False
        ins[0] = 0
        if archiver == ARCHIVER_HVA:
            contribs[0] = exclusive_contribution(objs, 1, 0)
        meta[META_COUNT] = 1
        meta[META_NEXT_INS] = 1
        meta[META_INITIALIZED] = 1
    done = 0
    while done < iter_budget:
        count = meta[META_COUNT]
        unvisited = 0
        for i in range(count):
            if not visited[i]:
                unvisited += 1
        if unvisited == 0:
            return 0
        if count + n + 1 > sols.shape[0]:
            return 2
        r = rand_below(rng_state, unvisited)
        pos = 0
        seen = 0
        for i in range(count):
            if not visited[i]:
                if seen == r:
                    pos = i
                    break
                seen += 1
        cur = sols[pos]
        for j in range(n):
            nb[j] = cur ^ (np.int64(1) << j)
        shuffle(rng_state, nb)
        for j in range(n):
            c = nb[j]
            if use_lookup:
                co = lookup[c]
            else:
                eval_into(tables, links, c, obj_buf)
                co = obj_buf
            archive_add(
                sols,
                objs,
                visited,
                ins,
                contribs,
                stale,
                grid,
                meta,
                archiver,
                mu,
                c,
                co,
                rem_sols,
                rem_objs,
                rem_visited,
                rem_ins,
            )
        count = meta[META_COUNT]
        for i in range(count):
            if sols[i] == cur:
                visited[i] = True
                break
        meta[META_LENGTH] += 1
        done += 1
    count = meta[META_COUNT]
    for i in range(count):
        if not visited[i]:
            return 1
    return 0


# ---------------------------------------------------------------------------
# enumeration and verification scans
# ---------------------------------------------------------------------------


@njit(cache=True)
def pareto_mask(F):
    """Nondominated mask over the rows of F.

    Rows are visited in descending lexicographic order, so every potential
    dominator of a row precedes it (equal vectors never dominate), and by
    transitivity it suffices to compare against already-kept rows.
    """
    N, m = F.shape
    perm = np.arange(N)
    key = np.empty(N, dtype=np.float64)
    for d in range(m - 1, -1, -1):
        for t in range(N):
            key[t] = -F[perm[t], d]
        order = np.argsort(key, kind="mergesort")
        perm = perm[order]
    mask = np.ones(N, dtype=np.bool_)
    for a in range(N):
        i = perm[a]
        for b in range(a):
            j = perm[b]
            if not mask[j]:
                continue
            ge = True
            for d in range(m):
                if F[j, d] < F[i, d]:
                    ge = False
                    break
            if ge:
                eq = True
                for d in range(m):
                    if F[j, d] != F[i, d]:
                        eq = False
                        break
                if not eq:
                    mask[i] = False
                    break
        # kept rows stay marked; dominated rows were never re-checked
    return mask


@njit(cache=True)
def plo_mask(F, n):
    """Mask of solutions that no 1-bit-flip neighbor dominates."""
    N, m = F.shape
    mask = np.ones(N, dtype=np.bool_)
    for p in range(N):
        for j in range(n):
            q = p ^ (1 << j)
            dom = True
            strict = False
            for d in range(m):
                if F[q, d] < F[p, d]:
                    dom = False
                    break
                if F[q, d] > F[p, d]:
                    strict = True
            if dom and strict:
                mask[p] = False
                break
    return mask


@njit(cache=True)
def set_is_plo(lookup, tables, links, n, sol_arr):
    """True when no member has a dominating 1-bit-flip neighbor."""
    use_lookup = lookup.shape[0] > 0
    m = lookup.shape[1]
    po = np.empty(m, dtype=np.float64)
    qo = np.empty(m, dtype=np.float64)
    for t in range(sol_arr.shape[0]):
        s = sol_arr[t]
        if use_lookup:
            for d in range(m):
                po[d] = lookup[s, d]
        else:
            eval_into(tables, links, s, po)
        for j in range(n):
            q = s ^ (np.int64(1) << j)
            if use_lookup:
                for d in range(m):
                    qo[d] = lookup[q, d]
            else:
                eval_into(tables, links, q, qo)
            dom = True
            strict = False
            for d in range(m):
                if qo[d] < po[d]:
                    dom = False
                    break
                if qo[d] > po[d]:
                    strict = True
            if dom and strict:
                return False
    return True


@njit(cache=True)
def set_mutually_nondominated_distinct(objs):
    """Pairwise mutual nondominance with distinct objective vectors."""
    S, m = objs.shape
    for i in range(S):
        for j in range(S):
            if j == i:
                continue
            ge = True
            eq = True
            for d in range(m):
                if objs[j, d] < objs[i, d]:
                    ge = False
                    break
                if objs[j, d] != objs[i, d]:
                    eq = False
            if ge and not eq:
                return False
            if ge and eq and j < i:
                return False
    return True


@njit(cache=True)
def set_is_maximal(lookup, tables, links, n, sol_arr, objs):
    """True when every neighbor of a member is weakly dominated by a member.

    Members are scanned strongest-sum-first so a weak dominator is usually
    found within a few comparisons.
    """
    use_lookup = lookup.shape[0] > 0
    S = sol_arr.shape[0]
    m = objs.shape[1]
    sorted_sols = np.sort(sol_arr)
    strength = np.empty(S, dtype=np.float64)
    for i in range(S):
        acc = 0.0
        for d in range(m):
            acc -= objs[i, d]
        strength[i] = acc
    order = np.argsort(strength, kind="mergesort")
    qo = np.empty(m, dtype=np.float64)
    for t in range(S):
        s = sol_arr[t]
        for j in range(n):
            q = s ^ (np.int64(1) << j)
            lo = np.searchsorted(sorted_sols, q)
            if lo < S and sorted_sols[lo] == q:
                continue  # members weakly dominate themselves
            if use_lookup:
                for d in range(m):
                    qo[d] = lookup[q, d]
            else:
                eval_into(tables, links, q, qo)
            ok = False
            for u in range(S):
                i = order[u]
                wd = True
                for d in range(m):
                    if objs[i, d] < qo[d]:
                        wd = False
                        break
                if wd:
                    ok = True
                    break
            if not ok:
                return False
    return True


@njit(cache=True)
def epsilon_max_min_ratio(A, P):
    """max over P of min over A of max over coordinates of p/a."""
    res = 0.0
    for p in range(P.shape[0]):
        best = np.inf
        for a in range(A.shape[0]):
            worst = 0.0
            for d in range(P.shape[1]):
                r = P[p, d] / A[a, d]
                if r > worst:
                    worst = r
            if worst < best:
                best = worst
        if best > res:
            res = best
    return res
