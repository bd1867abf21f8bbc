#include "symdx/experiment.hpp"

#include "symdx/error.hpp"

namespace symdx::experiment {

std::string_view to_string(ModelKind kind)
{
    return kind == ModelKind::lssvm ? "lssvm" : "cnn";
}

ModelKind parse_model_kind(std::string_view s)
{
    if (s == "lssvm" || s == "svm")
        return ModelKind::lssvm;
    if (s == "cnn")
        return ModelKind::cnn;
    fail(ErrorCode::InvalidArgument, "unknown model '" + std::string(s) + "'");
}

ordered_json config_to_json(const ExperimentConfig& cfg)
{
    ordered_json j;
    if (cfg.data)
        j["data"] = cfg.data->string();
    if (cfg.severity)
        j["severity"] = cfg.severity->string();
    j["synth"] = {{"num_diseases", cfg.synth.num_diseases},
                  {"records_per_disease", cfg.synth.records_per_disease},
                  {"min_pool", cfg.synth.min_pool},
                  {"max_pool", cfg.synth.max_pool},
                  {"unusual_fraction", cfg.synth.unusual_fraction},
                  {"presence", cfg.synth.presence},
                  {"seed", cfg.synth.seed}};
    j["model"] = to_string(cfg.model);
    j["features"] = symptomnet::to_string(cfg.features);
    j["encoding"] = corpus::to_string(cfg.encoding);
    j["test_fraction"] = cfg.test_fraction;
    j["seed"] = cfg.seed;
    if (cfg.sigma)
        j["sigma"] = *cfg.sigma;
    j["gamma"] = cfg.gamma;
    j["cnn"] = {{"conv_filters", cfg.cnn.conv_filters}, {"kernel_width", cfg.cnn.kernel_width},
                {"dense_units", cfg.cnn.dense_units},   {"pool_width", cfg.cnn.pool_width},
                {"learning_rate", cfg.cnn.learning_rate}, {"epochs", cfg.cnn.epochs},
                {"batch_size", cfg.cnn.batch_size}};
    return j;
}

namespace {

template <typename T>
void read_key(const ordered_json& j, const char* key, T& out)
{
    if (j.contains(key))
        out = j.at(key).get<T>();
}

} // namespace

ExperimentConfig config_from_json(const ordered_json& j, ExperimentConfig cfg)
{
    if (!j.is_object())
        fail(ErrorCode::InvalidConfig, "config must be an object");
    try {
        if (j.contains("data"))
            cfg.data = j.at("data").get<std::string>();
        if (j.contains("severity"))
            cfg.severity = j.at("severity").get<std::string>();
        if (j.contains("synth")) {
            const auto& s = j.at("synth");
            read_key(s, "num_diseases", cfg.synth.num_diseases);
            read_key(s, "records_per_disease", cfg.synth.records_per_disease);
            read_key(s, "min_pool", cfg.synth.min_pool);
            read_key(s, "max_pool", cfg.synth.max_pool);
            read_key(s, "unusual_fraction", cfg.synth.unusual_fraction);
            read_key(s, "presence", cfg.synth.presence);
            read_key(s, "seed", cfg.synth.seed);
        }
        if (j.contains("model"))
            cfg.model = parse_model_kind(j.at("model").get<std::string>());
        if (j.contains("features"))
            cfg.features = symptomnet::parse_feature_mode(j.at("features").get<std::string>());
        if (j.contains("encoding"))
            cfg.encoding = corpus::parse_encoding(j.at("encoding").get<std::string>());
        read_key(j, "test_fraction", cfg.test_fraction);
        read_key(j, "seed", cfg.seed);
        if (j.contains("sigma"))
            cfg.sigma = j.at("sigma").get<double>();
        read_key(j, "gamma", cfg.gamma);
        if (j.contains("cnn")) {
            const auto& c = j.at("cnn");
            read_key(c, "conv_filters", cfg.cnn.conv_filters);
            read_key(c, "kernel_width", cfg.cnn.kernel_width);
            read_key(c, "dense_units", cfg.cnn.dense_units);
            read_key(c, "pool_width", cfg.cnn.pool_width);
            read_key(c, "learning_rate", cfg.cnn.learning_rate);
            read_key(c, "epochs", cfg.cnn.epochs);
            read_key(c, "batch_size", cfg.cnn.batch_size);
        }
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::InvalidConfig, e.what());
    } catch (const Error& e) {
        fail(ErrorCode::InvalidConfig, e.what());
    }
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base)
{
    const std::string text = read_text_file(path);
    try {
        return config_from_json(ordered_json::parse(text), std::move(base));
    } catch (const nlohmann::json::parse_error& e) {
        fail(ErrorCode::InvalidConfig, e.what());
    }
}

Dataset prepare_dataset(corpus::Corpus corpus, const ExperimentConfig& cfg)
{
    Dataset d;
    d.corpus = std::move(corpus);
    d.vocab = corpus::build_vocabulary(d.corpus, cfg.severity);
    d.profiles = symptomnet::disease_profiles(d.corpus, d.vocab);
    d.occurrence = symptomnet::occurrence_histogram(d.profiles);
    d.matrix = corpus::encode(d.corpus, d.vocab, cfg.encoding);
    return d;
}

Dataset prepare_dataset(const ExperimentConfig& cfg)
{
    return prepare_dataset(cfg.data ? corpus::load_dataset(*cfg.data) : corpus::synth_generate(cfg.synth), cfg);
}

std::vector<int> TrainedModel::predict(const numkit::Matrix& rows) const
{
    if (lssvm)
        return lssvm::predict_labels(*lssvm, rows);
    if (cnn)
        return convnet::predict_labels(*cnn, rows);
    fail(ErrorCode::InvalidConfig, "no model trained");
}

TrainedModel fit_model(const ExperimentConfig& cfg, const Dataset& data,
                       const corpus::DesignMatrix& train, std::span<const std::size_t> feature_subset)
{
    TrainedModel out;
    const std::vector<std::size_t> subset(feature_subset.begin(), feature_subset.end());
    if (cfg.model == ModelKind::lssvm) {
        lssvm::KernelParams params = lssvm::KernelParams::defaults(train.cols());
        if (cfg.sigma)
            params.sigma = *cfg.sigma;
        params.gamma = cfg.gamma;
        auto model = lssvm::train(train, params);
        model.feature_subset = subset;
        model.vocabulary_hash = data.vocab.hash();
        out.lssvm = std::move(model);
    } else {
        convnet::CnnConfig c;
        c.input_length = train.cols();
        c.class_count = train.class_count();
        c.conv_filters = cfg.cnn.conv_filters;
        c.kernel_width = cfg.cnn.kernel_width;
        c.dense_units = cfg.cnn.dense_units;
        c.pool_width = cfg.cnn.pool_width;
        c.learning_rate = cfg.cnn.learning_rate;
        c.epochs = cfg.cnn.epochs;
        c.batch_size = cfg.cnn.batch_size;
        c.seed = cfg.seed;
        auto trained = convnet::train(convnet::init(c), train);
        trained.model.class_names = train.class_names;
        trained.model.feature_names = train.feature_names;
        trained.model.feature_subset = subset;
        trained.model.vocabulary_hash = data.vocab.hash();
        out.cnn = std::move(trained.model);
        out.loss_history = std::move(trained.loss_history);
    }
    return out;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const Dataset& data)
{
    const auto subset = symptomnet::feature_subset(data.vocab, data.occurrence, cfg.features);
    const auto active = data.matrix.subset_cols(subset);
    const auto [train, test] = corpus::stratified_split(active, cfg.test_fraction, cfg.seed);

    ExperimentResult result;
    result.model = fit_model(cfg, data, train, subset);
    const auto predicted = result.model.predict(test.features);
    result.report = metrics::macro_metrics(metrics::confusion(test.labels, predicted, test.class_count()));
    result.report.model = std::string(to_string(cfg.model));
    result.report.features = std::string(symptomnet::to_string(cfg.features));
    result.report.seed = cfg.seed;
    result.report.class_names = test.class_names;
    return result;
}

metrics::EvalReport run_experiment(const ExperimentConfig& cfg)
{
    return run_experiment(cfg, prepare_dataset(cfg)).report;
}

std::vector<metrics::EvalReport> ablate(const ExperimentConfig& cfg, const Dataset& data)
{
    std::vector<metrics::EvalReport> out;
    for (auto model : {ModelKind::lssvm, ModelKind::cnn}) {
        for (auto mode : {symptomnet::FeatureMode::common_only, symptomnet::FeatureMode::all}) {
            ExperimentConfig row = cfg;
            row.model = model;
            row.features = mode;
            out.push_back(run_experiment(row, data).report);
        }
    }
    return out;
}

std::vector<metrics::EvalReport> cross_validate(const ExperimentConfig& cfg, const Dataset& data,
                                                std::size_t folds)
{
    const auto subset = symptomnet::feature_subset(data.vocab, data.occurrence, cfg.features);
    const auto active = data.matrix.subset_cols(subset);
    std::vector<metrics::EvalReport> out;
    for (const auto& fold : corpus::kfold(active.labels, folds, cfg.seed)) {
        const auto train = active.subset_rows(fold.train);
        const auto valid = active.subset_rows(fold.validation);
        const auto model = fit_model(cfg, data, train, subset);
        auto report = metrics::macro_metrics(
            metrics::confusion(valid.labels, model.predict(valid.features), valid.class_count()));
        report.model = std::string(to_string(cfg.model));
        report.features = std::string(symptomnet::to_string(cfg.features));
        report.seed = cfg.seed;
        report.class_names = valid.class_names;
        out.push_back(std::move(report));
    }
    return out;
}

} // namespace symdx::experiment
