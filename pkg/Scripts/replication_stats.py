from kdmltc import distill, metrics, stats, synthetic
from kdmltc.corpus import stratified_kfold
from kdmltc.model import EncoderSpec

dim = 2**12
replications = 5
corpus = synthetic.generate_synthetic(300, 4, seed=3)
teacher = EncoderSpec(dim, [128, 64], "tanh", "teacher")
student = EncoderSpec(dim, [32], "tanh", "student")
cfg = distill.DistillConfig(epochs=3, max_length=64)

scores = {v: [] for v in distill.ABLATION_VARIANTS}
for r in range(replications):
    folds = stratified_kfold(corpus, 5, r)
    for v in distill.ABLATION_VARIANTS:
        p = distill.run_training(corpus, folds, v, teacher, student, cfg, r, workers=5)
        scores[v].append(metrics.example_f1(p))

print(stats.stats_report(scores))
