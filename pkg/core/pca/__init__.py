from core.pca.decompose import PcaDecomposition, decompose, score_series
from core.pca.panel import ProxyPanel, impute_column_means

__all__ = ["PcaDecomposition", "ProxyPanel", "decompose", "impute_column_means", "score_series"]
