from .analogy import AnalogyIndex, build_index, nearest_analogy, regression_to_mean
from .forest import ForestModel, ForestParams, rf_fit, rf_predict
from .kmeans import Clustering, cluster_validity, kmeans_fit, search_k, select_best_k
from .regression import RegressionModel, regress_predict, stepwise_fit
from .stats import BoxCoxParams, boxcox, fit_boxcox, normality_test
