"""Pure-Python episode assignment kernel.

Reference implementation of the hot loop; the optional compiled extension
(edgecluster._kernel) implements the same function with identical
floating-point semantics.  Keep the two in lockstep: the parity tests
compare their outputs bit for bit.
"""
from __future__ import annotations

import numpy as np

COMPILED = False


def run_assignment(
    crit,  # float64[n]: largest on-time cluster size per device
    cls_idx,  # uint8[n]: 0 = STRICT, 1 = LENIENT
    q,  # float64[max_occ+1, 2, vm_count+1, 2], updated in place when learn
    explore_u,  # float64[n]
    action_u,  # float64[n]
    epsilon,
    alpha,
    gamma,
    learn,
    vm_count,
    max_occ,
    inc_ok,
    dec_ok,
    inc_delayed,
    dec_delayed,
):
    """Stream n devices through the increment/decrement policy.

    Returns (vm_of, chosen, executed, rewards, delayed, forced, state_occ,
    state_vms, total_reward).  Action encoding: 0 = INCREMENT, 1 = DECREMENT.
    """
    n = len(crit)
    vm_of = np.empty(n, dtype=np.int32)
    chosen = np.empty(n, dtype=np.uint8)
    executed = np.empty(n, dtype=np.uint8)
    rewards = np.empty(n, dtype=np.int32)
    delayed_flags = np.empty(n, dtype=np.uint8)
    forced = np.zeros(n, dtype=np.uint8)
    state_occ = np.empty(n, dtype=np.int32)
    state_vms = np.empty(n, dtype=np.int32)

    sizes = [0] * vm_count
    min_crit = [np.inf] * vm_count
    open_count = 1  # cluster 0 starts open and empty
    current = 0
    vms_remaining = vm_count - 1
    total = 0

    for t in range(n):
        occ = sizes[current]
        s_occ = occ if occ < max_occ else max_occ
        s_cls = cls_idx[t]
        s_vms = vms_remaining
        state_occ[t] = s_occ
        state_vms[t] = s_vms

        if explore_u[t] < epsilon:
            act = 0 if action_u[t] < 0.5 else 1
        else:
            act = 0 if q[s_occ, s_cls, s_vms, 0] >= q[s_occ, s_cls, s_vms, 1] else 1
        chosen[t] = act

        if act == 1 and occ > 0:
            if vms_remaining > 0:
                # Seal the current cluster; candidate opens the next VM.
                current = open_count
                open_count += 1
                vms_remaining -= 1
                sizes[current] = 1
                min_crit[current] = crit[t]
                exe = 1
            else:
                # No VM left: coerced increment on the least-loaded cluster.
                tgt = 0
                for c in range(1, open_count):
                    if sizes[c] < sizes[tgt]:
                        tgt = c
                current = tgt
                sizes[current] += 1
                if crit[t] < min_crit[current]:
                    min_crit[current] = crit[t]
                exe = 0
                forced[t] = 1
        else:
            # INCREMENT, or DECREMENT with an empty current cluster (the
            # candidate becomes the first member of a fresh cluster either
            # way, so no new VM is consumed).
            sizes[current] += 1
            if crit[t] < min_crit[current]:
                min_crit[current] = crit[t]
            exe = 0 if act == 0 else 1

        executed[t] = exe
        vm_of[t] = current
        step_delayed = sizes[current] > min_crit[current]
        delayed_flags[t] = step_delayed
        if exe == 0:
            r = inc_delayed if step_delayed else inc_ok
        else:
            r = dec_delayed if step_delayed else dec_ok
        rewards[t] = r
        total += r

        if learn:
            if t + 1 < n:
                nocc = sizes[current] if sizes[current] < max_occ else max_occ
                ncls = cls_idx[t + 1]
                q0 = q[nocc, ncls, vms_remaining, 0]
                q1 = q[nocc, ncls, vms_remaining, 1]
                target = r + gamma * (q0 if q0 >= q1 else q1)
            else:
                target = float(r)
            q[s_occ, s_cls, s_vms, act] += alpha * (target - q[s_occ, s_cls, s_vms, act])

    return vm_of, chosen, executed, rewards, delayed_flags, forced, state_occ, state_vms, total
