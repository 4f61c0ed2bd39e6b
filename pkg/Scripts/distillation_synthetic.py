import numpy as np
from kdmltc import distill, metrics, synthetic
from kdmltc.corpus import stratified_kfold
from kdmltc.model import EncoderSpec

N = 600
L = 5
dim = 2**12
k = 5
seed = 1

corpus = synthetic.generate_synthetic(N, L, seed=seed, prevalence=0.25, correlation=0.3)
folds = stratified_kfold(corpus, k, seed)
teacher = EncoderSpec(dim, [128, 64], "tanh", "teacher")
student = EncoderSpec(dim, [32], "tanh", "student")
cfg = distill.DistillConfig(temperature=2., alpha=0.5, epochs=5, batch_size=16, max_length=64)

print("prevalence", np.round(corpus.prevalence(), 3))
for variant in distill.VARIANTS:
    p = distill.run_training(corpus, folds, variant, teacher, student, cfg, seed, workers=k)
    rep = metrics.full_report(p)
    print("%-32s example F1 %.4f  micro %.4f  macro %.4f  mean AUC %.4f"
          % (variant, rep.example_f1, rep.micro_f1, rep.macro_f1, rep.mean_auc))
