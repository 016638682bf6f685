import pytest

from refsim.gentrace import generate
from refsim.platform import platform_from_dict


def platform_doc(little_freqs=(0.5, 1.0, 2.0), big_freqs=(0.5, 1.0, 1.5, 2.0), n_little=4,
                 n_big=4, lat_ns=100.0, little=(0.5, 0.2, 0.05), big=(1.0, 0.4, 0.1),
                 big_scale=0.5):
    types = [{"name": "little", "cpi_scale": 1.0, "dyn_coeff_w_per_ghz3": little[0],
              "static_active_w": little[1], "idle_w": little[2], "reference": True}]
    domains = [{"core_type": "little", "core_count": n_little, "freqs_ghz": list(little_freqs)}]
    if n_big:
        types.append({"name": "big", "cpi_scale": big_scale, "dyn_coeff_w_per_ghz3": big[0],
                      "static_active_w": big[1], "idle_w": big[2], "reference": False})
        domains.append({"core_type": "big", "core_count": n_big, "freqs_ghz": list(big_freqs)})
    return {"core_types": types, "domains": domains, "mem_latency_ns": lat_ns}


def make_platform(**kw):
    return platform_from_dict(platform_doc(**kw))


def trace_spec(tasks, f_ref=2.0, sample_ms=10, lat_ns=100.0, ref="little"):
    """tasks: list of dicts with phases [(duration_ms, cpi_base, mpi[, jitter])] and arrival_ms."""
    out = []
    for i, t in enumerate(tasks):
        phases = [{"duration_ms": p[0], "cpi_base": p[1], "mpi": p[2],
                   "jitter": p[3] if len(p) > 3 else 0.0} for p in t["phases"]]
        out.append({"id": t.get("id", i), "arrival_ms": t.get("arrival_ms", 0), "phases": phases})
    return {"ref_freq_ghz": f_ref, "sample_ms": sample_ms, "ref_core_type": ref,
            "mem_latency_ns": lat_ns, "tasks": out}


def make_trace(tasks, seed=0, **kw):
    return generate(trace_spec(tasks, **kw), seed)


def const_tasks(n, duration_ms=2000, cpi=2.0, mpi=0.0):
    return [{"phases": [(duration_ms, cpi, mpi)]} for _ in range(n)]


@pytest.fixture
def big_little():
    return make_platform()
