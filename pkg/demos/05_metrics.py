"""
Scoring predictions
===================

Multiclass runs use macro-F1, accuracy and Cohen's kappa.  Multilabel runs
report ROC-AUC, PR-AUC and thresholded accuracy per relation type, then
average over types.
"""

from ddishift.core import DdiTriplet, PredictionRecord
from ddishift.metrics import cohens_kappa, macro_f1, multiclass_report, multilabel_report, pr_auc, roc_auc

print("macro-F1", macro_f1([0, 0, 1, 1], [0, 1, 1, 1]))
print("kappa", cohens_kappa([0, 1], [1, 0]))
print("ROC-AUC", roc_auc([0.8, 0.4, 0.6, 0.2], [1, 1, 0, 0]))
print("PR-AUC", pr_auc([0.9, 0.8, 0.7], [1, 0, 1]))

# Reports align predictions with gold pairs and refuse gaps or duplicates.
gold = [DdiTriplet("a", 0, "b"), DdiTriplet("a", 1, "c"), DdiTriplet("b", 2, "c")]
preds = [PredictionRecord("a", "b", 0), PredictionRecord("a", "c", 2), PredictionRecord("b", "c", 2)]
print(multiclass_report(preds, gold).to_csv())

records = [
    PredictionRecord("a", "b", 7, 0.9, 1),
    PredictionRecord("a", "c", 7, 0.3, 0),
    PredictionRecord("b", "c", 9, 0.6, 1),
    PredictionRecord("c", "d", 9, 0.6, 0),
]
print(multilabel_report(records).to_json())
