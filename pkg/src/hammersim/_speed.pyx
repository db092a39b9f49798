# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled simulation kernel.

Replicates the pure-Python kernel in engine._simulate_py exactly: the same
SplitMix64 substreams, the same draw order, the same tie-breaking. Any
behavioral change here must be made in the Python kernel too; the parity
test suite compares both bit-for-bit.

The tracker scan is fused: one pass over the table yields the hit slot,
the first invalid slot, and the LFU/LRU victims, since the deterministic
policies consult the table on every activation.
"""

import numpy as np

cdef extern from *:
    """
    #include <stdint.h>
    static inline uint64_t hs_mulshift(uint64_t u, uint64_t n) {
        return (uint64_t)(((__uint128_t)u * n) >> 64);
    }
    """
    unsigned long long hs_mulshift(unsigned long long u, unsigned long long n) nogil


cdef unsigned long long GOLDEN = 0x9E3779B97F4A7C15UL
cdef double TWO64 = 18446744073709551616.0

DEF POL_BASELINE = 0
DEF POL_PROTEAS = 1
DEF POL_PMSS = 2
DEF POL_DSAC = 3
DEF POL_PROHIT = 4
DEF POL_PARA = 5
DEF POL_GRAPHENE = 6

DEF EV_LFU = 0
DEF EV_LRU = 1
DEF EV_RANDOM = 2
DEF EV_BIP = 3


cdef struct Scan:
    int hit
    int invalid
    int lfu
    int lru


cdef inline unsigned long long _mix(unsigned long long z) nogil:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9UL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBUL
    return z ^ (z >> 31)


cdef inline unsigned long long _next(unsigned long long* s) nogil:
    s[0] = s[0] + GOLDEN
    return _mix(s[0])


cdef inline bint _bern(unsigned long long* s, double p) nogil:
    cdef unsigned long long u = _next(s)
    cdef double t
    if p >= 1.0:
        return True
    t = p * TWO64
    if t >= TWO64:
        return True
    return u < <unsigned long long> t


cdef inline long long _uniform(unsigned long long* s, long long n) nogil:
    return <long long> hs_mulshift(_next(s), <unsigned long long> n)


cdef inline int _lookup(int cap, int[::1] rows, unsigned char[::1] valid, int row) nogil:
    cdef int i
    for i in range(cap):
        if valid[i] and rows[i] == row:
            return i
    return -1


cdef inline void _scan_miss(int cap, int[::1] counts, int[::1] last,
                            unsigned char[::1] valid, Scan* out) nogil:
    """Victim candidates for a known miss: first invalid slot plus the LFU
    and LRU slots (lowest index wins ties)."""
    cdef int i
    out.hit = -1
    out.invalid = -1
    out.lfu = -1
    out.lru = -1
    for i in range(cap):
        if valid[i]:
            if out.lfu < 0 or counts[i] < counts[out.lfu]:
                out.lfu = i
            if out.lru < 0 or last[i] < last[out.lru]:
                out.lru = i
        elif out.invalid < 0:
            out.invalid = i


cdef inline int _argmax_count(int cap, int[::1] counts, unsigned char[::1] valid) nogil:
    cdef int i, best = -1
    for i in range(cap):
        if valid[i] and (best < 0 or counts[i] > counts[best]):
            best = i
    return best


cdef inline void _place(int slot, int row, int cnt, int now,
                        int[::1] rows, int[::1] counts,
                        int[::1] last, unsigned char[::1] valid) nogil:
    rows[slot] = row
    counts[slot] = cnt
    last[slot] = now
    valid[slot] = 1


cdef inline void _insert_miss(int cap, int row, int ev_id, double bip_eps,
                              unsigned long long* ev_state, int now, Scan* sc,
                              int[::1] rows, int[::1] counts,
                              int[::1] last, unsigned char[::1] valid) nogil:
    """Insert a missing row with count 0: invalid slot first, else apply the
    eviction rule (BIP may bypass)."""
    cdef int slot = sc.invalid
    if slot < 0:
        if ev_id == EV_LFU:
            slot = sc.lfu
        elif ev_id == EV_LRU:
            slot = sc.lru
        elif ev_id == EV_RANDOM:
            slot = <int> _uniform(ev_state, cap)
        else:  # BIP
            if not _bern(ev_state, bip_eps):
                return
            slot = sc.lru
    _place(slot, row, 0, now, rows, counts, last, valid)


def simulate_kernel(long long total_acts, int acts_per_trefi, int rfm_th,
                    int[::1] cycle, bint aligned,
                    int policy_id, double p1, double p2, int ev_id, double bip_eps,
                    int capacity, int hot_cap, int cold_cap, long long graphene_th,
                    unsigned long long seed_sampling,
                    unsigned long long seed_eviction,
                    unsigned long long seed_para,
                    long long[::1] mx, long long[::1] tot):
    """Run one full window; fills per-row maxima/totals in place and returns
    (mitigations_issued, empty_slots, scheduled_slots, occupancy_sum)."""
    cdef int footprint = mx.shape[0]
    cdef int period = cycle.shape[0]
    cdef int cap = capacity
    if policy_id == POL_PROHIT:
        cap = hot_cap  # main arrays double as the hot table

    cur_np = np.zeros(footprint, dtype=np.int64)
    rows_np = np.full(max(cap, 1), -1, dtype=np.int32)
    counts_np = np.zeros(max(cap, 1), dtype=np.int32)
    last_np = np.zeros(max(cap, 1), dtype=np.int32)
    valid_np = np.zeros(max(cap, 1), dtype=np.uint8)
    c_rows_np = np.full(max(cold_cap, 1), -1, dtype=np.int32)
    c_counts_np = np.zeros(max(cold_cap, 1), dtype=np.int32)
    c_last_np = np.zeros(max(cold_cap, 1), dtype=np.int32)
    c_valid_np = np.zeros(max(cold_cap, 1), dtype=np.uint8)

    cdef long long[::1] cur = cur_np
    cdef int[::1] rows = rows_np
    cdef int[::1] counts = counts_np
    cdef int[::1] last = last_np
    cdef unsigned char[::1] valid = valid_np
    cdef int[::1] c_rows = c_rows_np
    cdef int[::1] c_counts = c_counts_np
    cdef int[::1] c_last = c_last_np
    cdef unsigned char[::1] c_valid = c_valid_np

    cdef unsigned long long s_samp = seed_sampling
    cdef unsigned long long s_evict = seed_eviction
    cdef unsigned long long s_para = seed_para

    cdef long long g, c, mitigations = 0, occ_sum = 0, slots = 0, empty = 0
    cdef int raa = 0, tp = 0, phase = 0
    cdef int li, i, slot, demote, immediate, row, cnt, now, hit
    cdef double pe
    cdef Scan sc

    with nogil:
        for g in range(total_acts):
            now = <int> g
            if aligned:
                li = cycle[tp % period]
            else:
                li = cycle[phase]
            phase += 1
            if phase == period:
                phase = 0

            c = cur[li] + 1
            cur[li] = c
            tot[li] += 1
            if c > mx[li]:
                mx[li] = c

            immediate = -1

            if policy_id == POL_BASELINE:
                hit = _lookup(cap, rows, valid, li)
                if hit >= 0:
                    counts[hit] += 1
                    last[hit] = now
                else:
                    _scan_miss(cap, counts, last, valid, &sc)
                    _insert_miss(cap, li, ev_id, bip_eps, &s_evict, now, &sc,
                                 rows, counts, last, valid)

            elif policy_id == POL_PROTEAS:
                if _bern(&s_samp, p1):
                    hit = _lookup(cap, rows, valid, li)
                    if hit >= 0:
                        counts[hit] += 1
                        last[hit] = now
                    else:
                        _scan_miss(cap, counts, last, valid, &sc)
                        _insert_miss(cap, li, ev_id, bip_eps, &s_evict, now, &sc,
                                     rows, counts, last, valid)

            elif policy_id == POL_PMSS:
                hit = _lookup(cap, rows, valid, li)
                if hit >= 0:
                    counts[hit] += 1
                    last[hit] = now
                else:
                    _scan_miss(cap, counts, last, valid, &sc)
                    if sc.invalid >= 0:
                        _place(sc.invalid, li, 0, now, rows, counts, last, valid)
                    elif _bern(&s_samp, p1):
                        _insert_miss(cap, li, ev_id, bip_eps, &s_evict, now, &sc,
                                     rows, counts, last, valid)

            elif policy_id == POL_DSAC:
                hit = _lookup(cap, rows, valid, li)
                if hit >= 0:
                    counts[hit] += 1
                    last[hit] = now
                else:
                    _scan_miss(cap, counts, last, valid, &sc)
                    if sc.invalid >= 0:
                        _place(sc.invalid, li, 0, now, rows, counts, last, valid)
                    else:
                        pe = 1.0 / (1.0 + <double> counts[sc.lfu])
                        if pe < p2:
                            pe = p2
                        if _bern(&s_samp, pe):
                            _place(sc.lfu, li, 0, now, rows, counts, last, valid)

            elif policy_id == POL_PROHIT:
                hit = _lookup(cap, rows, valid, li)
                if hit >= 0:
                    counts[hit] += 1
                    last[hit] = now
                else:
                    hit = _lookup(cold_cap, c_rows, c_valid, li)
                    if hit >= 0:
                        c_counts[hit] += 1
                        if _bern(&s_samp, p1):
                            # promote to hot; a full hot table demotes its
                            # LFU entry into the freed cold slot
                            row = c_rows[hit]
                            cnt = c_counts[hit]
                            c_valid[hit] = 0
                            c_rows[hit] = -1
                            c_counts[hit] = 0
                            slot = -1
                            for i in range(cap):
                                if not valid[i]:
                                    slot = i
                                    break
                            if slot >= 0:
                                _place(slot, row, cnt, now, rows, counts, last, valid)
                            else:
                                demote = 0
                                for i in range(1, cap):
                                    if counts[i] < counts[demote]:
                                        demote = i
                                _place(hit, rows[demote], counts[demote], now,
                                       c_rows, c_counts, c_last, c_valid)
                                _place(demote, row, cnt, now, rows, counts, last, valid)
                    else:
                        _scan_miss(cold_cap, c_counts, c_last, c_valid, &sc)
                        slot = sc.invalid
                        if slot < 0:
                            slot = sc.lru  # FIFO: oldest insertion time
                        _place(slot, li, 0, now, c_rows, c_counts, c_last, c_valid)

            elif policy_id == POL_PARA:
                if _bern(&s_para, p1):
                    immediate = li

            else:  # POL_GRAPHENE
                hit = _lookup(cap, rows, valid, li)
                if hit >= 0:
                    counts[hit] += 1
                    if counts[hit] >= graphene_th:
                        valid[hit] = 0
                        counts[hit] = 0
                        rows[hit] = -1
                        immediate = li
                    slot = -2
                else:
                    _scan_miss(cap, counts, last, valid, &sc)
                    slot = sc.invalid
                if slot >= 0:
                    _place(slot, li, 1, now, rows, counts, last, valid)
                    if 1 >= graphene_th:
                        valid[slot] = 0
                        counts[slot] = 0
                        rows[slot] = -1
                        immediate = li
                elif slot == -1:
                    for i in range(cap):
                        if valid[i]:
                            counts[i] -= 1
                            if counts[i] == 0:
                                valid[i] = 0
                                rows[i] = -1

            if immediate >= 0:
                cur[immediate] = 0
                mitigations += 1

            raa += 1
            if raa == rfm_th:
                raa = 0
                slots += 1
                # occupancy sampled before the mitigation fires
                if policy_id == POL_PROHIT:
                    for i in range(cap):
                        if valid[i]:
                            occ_sum += 1
                    for i in range(cold_cap):
                        if c_valid[i]:
                            occ_sum += 1
                elif policy_id != POL_PARA:
                    for i in range(cap):
                        if valid[i]:
                            occ_sum += 1

                row = -1
                if policy_id == POL_PROHIT:
                    slot = _argmax_count(cap, counts, valid)
                    if slot >= 0:
                        row = rows[slot]
                        valid[slot] = 0
                        counts[slot] = 0
                        rows[slot] = -1
                    else:
                        slot = _argmax_count(cold_cap, c_counts, c_valid)
                        if slot >= 0:
                            row = c_rows[slot]
                            c_valid[slot] = 0
                            c_counts[slot] = 0
                            c_rows[slot] = -1
                elif policy_id != POL_PARA and policy_id != POL_GRAPHENE:
                    slot = _argmax_count(cap, counts, valid)
                    if slot >= 0:
                        row = rows[slot]
                        valid[slot] = 0
                        counts[slot] = 0
                        rows[slot] = -1

                if row >= 0:
                    mitigations += 1
                    cur[row] = 0
                else:
                    empty += 1

            tp += 1
            if tp == acts_per_trefi:
                tp = 0

    return mitigations, empty, slots, occ_sum
