"""Component-based peak-finding clustering for mixed-attribute data.

Thin wrapper over the C++ extension module. The heavy lifting (mutual k-NN
graph, component decomposition, density peaks, conductance-based center
selection) all happens in native code with the GIL released.
"""

import json

try:
    from ._cpf import (
        DataError,
        __version__,
        cluster_file as _cluster_file,
        decision_graph_file,
        evaluate,
        sweep_file,
    )
except ImportError:  # development builds keep _cpf next to the package
    from _cpf import (
        DataError,
        __version__,
        cluster_file as _cluster_file,
        decision_graph_file,
        evaluate,
        sweep_file,
    )

__all__ = [
    "DataError",
    "__version__",
    "cluster_file",
    "decision_graph_file",
    "evaluate",
    "sweep_file",
]


def cluster_file(input, **kwargs):
    """Cluster a delimited text file.

    Returns a dict with:
      labels     -- one integer per input data row (-1 for dropped/outlier rows)
      used_rows  -- original row index of every retained row
      truth      -- dense ids of the truth column, when ``truth_col`` was given
      report     -- parsed JSON report (parameters, components, timings)
    """
    out = _cluster_file(input, **kwargs)
    out["report"] = json.loads(out.pop("report_json"))
    return out
