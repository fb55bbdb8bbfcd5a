"""Corpus-to-embeddings toolkit: preprocessing, vocabulary statistics,
subword-aware CBoW/SG and GloVe training, and intrinsic evaluation."""

from .cooccur import CooccurrenceStore, accumulate_cooccurrence, iter_shuffled
from .embedding import EmbeddingSet
from .eval import (
    EvalReport,
    WordSimDataset,
    cosine_similarity,
    nearest_neighbors,
    pair_similarity_report,
    spearman_rho,
    word_vector,
)
from .glove import GloveConfig, GloveModel, glove_loss, glove_weight, train_glove
from .pipeline import (
    CleanCorpus,
    PipelineConfig,
    load_corpus,
    replace_symbols,
    run_pipeline,
    save_corpus,
    strip_noise,
    tokenize,
)
from .subword import SubwordConfig, char_ngrams, ngram_bucket
from .vocab import (
    LetterNgramStats,
    StopWordCandidates,
    Vocabulary,
    build_vocab,
    stopword_candidates,
    subsample_keep_prob,
    word_length_stats,
)
from .w2v import (
    HuffmanTree,
    UnigramTable,
    W2vConfig,
    build_huffman,
    build_unigram_table,
    hs_word_probability,
    train_cbow,
    train_sg,
)

__version__ = "0.1.0"
