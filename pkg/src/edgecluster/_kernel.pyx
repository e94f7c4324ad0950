# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled episode assignment kernel.

Same semantics as edgecluster._kernel_py.run_assignment, bit for bit.
Any behavioral change must be mirrored there.
"""
import numpy as np

COMPILED = True


def run_assignment(
    double[::1] crit,
    unsigned char[::1] cls_idx,
    double[:, :, :, ::1] q,
    double[::1] explore_u,
    double[::1] action_u,
    double epsilon,
    double alpha,
    double gamma,
    bint learn,
    int vm_count,
    int max_occ,
    int inc_ok,
    int dec_ok,
    int inc_delayed,
    int dec_delayed,
):
    cdef Py_ssize_t n = crit.shape[0]
    vm_of_arr = np.empty(n, dtype=np.int32)
    chosen_arr = np.empty(n, dtype=np.uint8)
    executed_arr = np.empty(n, dtype=np.uint8)
    rewards_arr = np.empty(n, dtype=np.int32)
    delayed_arr = np.empty(n, dtype=np.uint8)
    forced_arr = np.zeros(n, dtype=np.uint8)
    state_occ_arr = np.empty(n, dtype=np.int32)
    state_vms_arr = np.empty(n, dtype=np.int32)

    cdef int[::1] vm_of = vm_of_arr
    cdef unsigned char[::1] chosen = chosen_arr
    cdef unsigned char[::1] executed = executed_arr
    cdef int[::1] rewards = rewards_arr
    cdef unsigned char[::1] delayed_flags = delayed_arr
    cdef unsigned char[::1] forced = forced_arr
    cdef int[::1] state_occ = state_occ_arr
    cdef int[::1] state_vms = state_vms_arr

    sizes_arr = np.zeros(vm_count, dtype=np.int32)
    min_crit_arr = np.full(vm_count, np.inf)
    cdef int[::1] sizes = sizes_arr
    cdef double[::1] min_crit = min_crit_arr

    cdef int open_count = 1
    cdef int current = 0
    cdef int vms_remaining = vm_count - 1
    cdef long long total = 0

    cdef Py_ssize_t t
    cdef int occ, s_occ, s_vms, act, exe, r, tgt, c, nocc
    cdef unsigned char s_cls, ncls
    cdef bint step_delayed
    cdef double target, q0, q1

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
                current = open_count
                open_count += 1
                vms_remaining -= 1
                sizes[current] = 1
                min_crit[current] = crit[t]
                exe = 1
            else:
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
                target = <double> r
            q[s_occ, s_cls, s_vms, act] += alpha * (target - q[s_occ, s_cls, s_vms, act])

    return (
        vm_of_arr,
        chosen_arr,
        executed_arr,
        rewards_arr,
        delayed_arr,
        forced_arr,
        state_occ_arr,
        state_vms_arr,
        int(total),
    )
