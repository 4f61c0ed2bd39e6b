import numpy as np
from kdmltc import distill, metrics, synthetic
from kdmltc.corpus import stratified_kfold
from kdmltc.model import EncoderSpec

dim = 2**12
seed = 0
temperatures = [1., 2., 3., 4.]
alphas = [0.1, 0.5, 0.9]

corpus = synthetic.generate_synthetic(400, 4, seed=seed, prevalence=0.3)
folds = stratified_kfold(corpus, 5, seed)
teacher = EncoderSpec(dim, [128, 64], "tanh", "teacher")
student = EncoderSpec(dim, [32], "tanh", "student")

F1 = np.zeros((len(temperatures), len(alphas)))
for i, T in enumerate(temperatures):
    for j, a in enumerate(alphas):
        cfg = distill.DistillConfig(temperature=T, alpha=a, epochs=3, max_length=64)
        p = distill.distill_sequential(corpus, folds, teacher, student, cfg, seed, workers=5)
        F1[i, j] = metrics.example_f1(p)

print("example F1, rows T =", temperatures, "columns alpha =", alphas)
print(np.round(F1, 4))
