from tripx.extract.core import (
    B,
    I,
    O,
    TAGS,
    AnnotatedSentence,
    EntitySpan,
    RelationSet,
    Sentence,
    Triple,
    biodecode,
    bioencode,
)
from tripx.extract.config import (
    DataConfig,
    EncoderConfig,
    InferenceConfig,
    RunConfig,
    SynthConfig,
    TrainConfig,
    loadconfig,
)
from tripx.extract.encoder import DeskEncoder, Vocabulary, avgpool, encode, firstsubwordpool, tokenize
from tripx.extract.decoder import (
    DecoderParams,
    PredictionBundle,
    globalcorrespondence,
    predictbundle,
    predictrelations,
    selectrelations,
    tagsequences,
)
from tripx.extract.model import Extractor
from tripx.extract.labeling import GoldLabels, buildgold, detectinterference, goldbundle
from tripx.extract.training import (
    Checkpoint,
    lossglobal,
    lossrel,
    lossseq,
    losstotal,
    train,
)
from tripx.extract.inference import (
    Extraction,
    decodebundle,
    extract,
    extractbruteforce,
    extracttriples,
)
from tripx.extract.checkpoint import loadcheckpoint, savecheckpoint
from tripx.extract.data import Dataset, classifypattern, datasetstats, loaddataset
from tripx.extract.synthetic import gensynthetic
from tripx.extract.eval import ScoreReport, breakdown, scoresubtasks, scoretriples
