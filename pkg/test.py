import dotenv
from string_algebra_workbench import StringAlgebraWorkbench
from src.config import load_config
dotenv.load_dotenv()

workbench = StringAlgebraWorkbench(load_config(word_bound=4, samples=50))

corpus = ["corpus/a1tilde.alg", "corpus/r1.alg", "corpus/g23.alg", "corpus/lambda2.alg"]

for path in corpus:
    A = workbench.load(path)
    print(A.name, workbench.domestic(A).text)
    print("  bands:", ", ".join(workbench.bands(A).bands))

# # bridge quiver of Lambda2
# A = workbench.load("corpus/lambda2.alg")
# report, dot = workbench.bridge(A)
# print(dot)

# the biperiodic string over R1, with beta on the +1 side
r1_workbench = StringAlgebraWorkbench(load_config(partition_override={"b": 1, "b^-1": 1, "a": -1, "a^-1": -1}))
R1 = r1_workbench.load("corpus/r1.alg")
word = "inf^(b a^-1) . b (a b^-1)^inf"

print(r1_workbench.ringel_truncate(R1, word, 2).truncation)
verdict = r1_workbench.ringel_pp(R1, word, "b a^-1 . b a b^-1", oracle=True)
print(verdict.verdict, verdict.phi, verdict.psi)
print(verdict.oracle.answers)

# M, m = r1_workbench.pointed_module(R1, word="b a^-1 b a b^-1", node="2")
# print(r1_workbench.ringel_classify(R1, word, M, m, oracle=True))

print('done')
