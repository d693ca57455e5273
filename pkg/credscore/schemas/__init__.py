from .assessment import (
    Attribution,
    CorrelationCell,
    CorrelationRow,
    CorrelationTable,
    CredibilityRank,
    Explanation,
    ForecastOutcome,
    OutcomeStatus,
    TradingCalendar,
    VerificationConfig,
    WeekdayCalendar,
)
from .corpus import (
    CATEGORY_DISPLAY_NAMES,
    CLASS_ORDER,
    FORECAST_CATEGORIES,
    SOCIAL_METRIC_FIELDS,
    Category,
    CategoryShare,
    CleanPost,
    CorpusSummary,
    LabeledPost,
    Post,
    PriceBar,
    PriceSeries,
    SocialMetrics,
    TickerDictionary,
)
from .features import (
    EMOTIONS,
    POS_CLASSES,
    SCALAR_DISPLAY_NAMES,
    SCALAR_FEATURE_NAMES,
    FeatureVector,
    ScalarFeatures,
    VectorizerConfig,
    VectorizerMode,
    Vocabulary,
)
from .models import (
    AdvisorClassification,
    Algorithm,
    CategoryLexicons,
    ClassMetrics,
    ClassificationRecord,
    ClassificationSource,
    EvalReport,
    GridPointScore,
    GridSearchResult,
    LexiconEntry,
    LexiconMatch,
    ModelSpec,
)
