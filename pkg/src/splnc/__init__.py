"""Self-paced SVM training with neighbourhood-constrained sample weights
for pixel classification of polarimetric SAR scenes."""

__version__ = "0.1.0"

from .baselines import WishartCenters, train_plain_svm, wishart_centers, wishart_classify
from .dataset import GridDataset, read_dataset, write_dataset
from .features import cloude_pottier, eig3_hermitian, feature_vector, normalize_features
from .metrics import confusion_matrix, oa_aa, render_class_map
from .scene import SceneSpec, builtin_class_sigmas, generate_scene, sample_wishart_coherency
from .spl import advance_pace, init_pace, weight_binary, weight_linear, weight_neighborhood
from .svm import KernelParams, SvmModel, hinge_losses, kkt_violation, solve_weighted_dual
from .trainer import MulticlassModel, TrainerConfig, predict, train_multiclass, train_spl_svm_binary
