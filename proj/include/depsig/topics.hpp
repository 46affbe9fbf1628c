#pragma once

// LDA fitted by collapsed Gibbs sampling, topic summaries, lexicon-based
// depression flagging, and topic-level feature vectors.

#include <algorithm>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "depsig/common.hpp"
#include "depsig/corpus.hpp"
#include "depsig/features.hpp"
#include "depsig/lexicon.hpp"

namespace depsig {

struct LdaParams {
    std::size_t n_topics = 50;
    double alpha = 0.01;
    double beta = 0.01;
    std::size_t iterations = 1000;
    std::uint64_t seed = 1;

    void validate() const {
        if (n_topics < 2) throw ValidationError("LDA needs at least 2 topics");
        if (!(alpha > 0.0) || !(beta > 0.0)) throw ValidationError("LDA alpha and beta must be positive");
        if (iterations < 1) throw ValidationError("LDA needs at least one sweep");
    }
};

struct TopicModel {
    LdaParams params;
    std::vector<std::string> vocab;
    std::vector<std::string> doc_ids;
    std::vector<std::vector<double>> phi;    ///< K x V
    std::vector<std::vector<double>> theta;  ///< D x K
    std::vector<std::vector<int>> assignments;

    std::size_t n_topics() const { return phi.size(); }
    std::size_t n_docs() const { return theta.size(); }

    /// Most probable topic of a document; ties go to the lower id.
    std::size_t argmax_topic(std::size_t doc) const {
        const auto& row = theta.at(doc);
        return static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
    }
};

/// Collapsed Gibbs state. Exposed so sweeps can be stepped and inspected.
class LdaSampler {
public:
    LdaSampler(const std::vector<TokenizedDoc>& docs, const LdaParams& params) : params_(params), rng_(params.seed) {
        params_.validate();
        if (docs.size() < params_.n_topics)
            throw ValidationError("LDA needs at least K=" + std::to_string(params_.n_topics) + " documents, got " +
                                  std::to_string(docs.size()));
        std::set<std::string> words;
        for (const auto& d : docs) {
            if (d.tokens.empty()) throw ValidationError("LDA input document '" + d.post_id + "' is empty");
            words.insert(d.tokens.begin(), d.tokens.end());
        }
        vocab_.assign(words.begin(), words.end());
        if (vocab_.size() < params_.n_topics)
            throw ValidationError("LDA vocabulary (" + std::to_string(vocab_.size()) + " words) is smaller than K=" +
                                  std::to_string(params_.n_topics));
        std::unordered_map<std::string, int> index;
        for (std::size_t i = 0; i < vocab_.size(); ++i) index[vocab_[i]] = static_cast<int>(i);

        const std::size_t K = params_.n_topics;
        const std::size_t V = vocab_.size();
        words_.resize(docs.size());
        z_.resize(docs.size());
        doc_ids_.reserve(docs.size());
        n_dk_.assign(docs.size() * K, 0);
        n_kw_.assign(K * V, 0);
        n_k_.assign(K, 0);
        for (std::size_t d = 0; d < docs.size(); ++d) {
            doc_ids_.push_back(docs[d].post_id);
            for (const auto& t : docs[d].tokens) {
                const int w = index.at(t);
                const int k = static_cast<int>(rng_.below(K));
                words_[d].push_back(w);
                z_[d].push_back(k);
                ++n_dk_[d * K + k];
                ++n_kw_[k * V + w];
                ++n_k_[k];
            }
        }
        probs_.resize(K);
    }

    /// One pass resampling every token's topic from its full conditional.
    void sweep() {
        const std::size_t K = params_.n_topics;
        const std::size_t V = vocab_.size();
        const double alpha = params_.alpha;
        const double beta = params_.beta;
        const double vbeta = static_cast<double>(V) * beta;
        for (std::size_t d = 0; d < words_.size(); ++d) {
            int* ndk = &n_dk_[d * K];
            for (std::size_t i = 0; i < words_[d].size(); ++i) {
                const int w = words_[d][i];
                int k = z_[d][i];
                --ndk[k];
                --n_kw_[k * V + w];
                --n_k_[k];
                double total = 0.0;
                for (std::size_t j = 0; j < K; ++j) {
                    total += (ndk[j] + alpha) * (n_kw_[j * V + w] + beta) / (n_k_[j] + vbeta);
                    probs_[j] = total;
                }
                const double u = rng_.uniform() * total;
                k = static_cast<int>(std::upper_bound(probs_.begin(), probs_.end(), u) - probs_.begin());
                if (k >= static_cast<int>(K)) k = static_cast<int>(K) - 1;
                z_[d][i] = k;
                ++ndk[k];
                ++n_kw_[k * V + w];
                ++n_k_[k];
            }
        }
        ++sweeps_;
    }

    void run() {
        while (sweeps_ < params_.iterations) sweep();
    }

    const std::vector<std::string>& vocab() const { return vocab_; }
    std::size_t sweeps() const { return sweeps_; }
    int topic_word_count(std::size_t k, std::size_t w) const { return n_kw_[k * vocab_.size() + w]; }
    int topic_count(std::size_t k) const { return n_k_[k]; }
    int doc_topic_count(std::size_t d, std::size_t k) const { return n_dk_[d * params_.n_topics + k]; }

    /// Smoothed point estimates from the current state.
    TopicModel model() const {
        const std::size_t K = params_.n_topics;
        const std::size_t V = vocab_.size();
        TopicModel m;
        m.params = params_;
        m.params.iterations = sweeps_;
        m.vocab = vocab_;
        m.doc_ids = doc_ids_;
        m.assignments = z_;
        m.phi.assign(K, std::vector<double>(V));
        for (std::size_t k = 0; k < K; ++k) {
            const double denom = n_k_[k] + static_cast<double>(V) * params_.beta;
            for (std::size_t w = 0; w < V; ++w) m.phi[k][w] = (n_kw_[k * V + w] + params_.beta) / denom;
        }
        m.theta.assign(words_.size(), std::vector<double>(K));
        for (std::size_t d = 0; d < words_.size(); ++d) {
            const double denom = static_cast<double>(words_[d].size()) + static_cast<double>(K) * params_.alpha;
            for (std::size_t k = 0; k < K; ++k) m.theta[d][k] = (n_dk_[d * K + k] + params_.alpha) / denom;
        }
        return m;
    }

private:
    LdaParams params_;
    Rng rng_;
    std::vector<std::string> vocab_;
    std::vector<std::string> doc_ids_;
    std::vector<std::vector<int>> words_;
    std::vector<std::vector<int>> z_;
    std::vector<int> n_dk_;
    std::vector<int> n_kw_;
    std::vector<int> n_k_;
    std::vector<double> probs_;
    std::size_t sweeps_ = 0;
};

/// Fits LDA and returns the final-state estimate. Deterministic in the seed.
inline TopicModel fit_lda(const std::vector<TokenizedDoc>& docs, const LdaParams& params) {
    LdaSampler sampler(docs, params);
    sampler.run();
    return sampler.model();
}

// ---------------------------------------------------------------------------
// Summaries and flagging
// ---------------------------------------------------------------------------

struct TopicSummary {
    std::size_t topic_id = 0;
    std::vector<std::pair<std::string, double>> top_words;
    bool depression_flag = false;
    std::set<std::string> matched_terms;
};

/// The k most probable words of every topic; equal probabilities are
/// ordered lexicographically.
inline std::vector<TopicSummary> top_words(const TopicModel& model, std::size_t k) {
    if (k < 1 || k > model.vocab.size())
        throw ValidationError("top_words: k must lie in [1, " + std::to_string(model.vocab.size()) + "]");
    std::vector<TopicSummary> out;
    std::vector<std::size_t> order(model.vocab.size());
    for (std::size_t t = 0; t < model.n_topics(); ++t) {
        const auto& row = model.phi[t];
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                          [&](std::size_t a, std::size_t b) {
                              return row[a] != row[b] ? row[a] > row[b] : model.vocab[a] < model.vocab[b];
                          });
        TopicSummary s;
        s.topic_id = t;
        for (std::size_t i = 0; i < k; ++i) s.top_words.emplace_back(model.vocab[order[i]], row[order[i]]);
        out.push_back(std::move(s));
    }
    return out;
}

/// Heuristic stand-in for clinician validation: a topic is flagged when at
/// least `min_hits` of its top words are depression-related.
inline std::vector<TopicSummary> flag_depression_topics(std::vector<TopicSummary> summaries, const TermList& who,
                                                        const EmotionLexicon& nrc, std::size_t min_hits) {
    if (min_hits < 1) throw ValidationError("flag_depression_topics: min_hits must be >= 1");
    for (auto& s : summaries) {
        s.matched_terms.clear();
        for (const auto& [word, p] : s.top_words)
            if (is_depression_word(word, who, nrc)) s.matched_terms.insert(word);
        s.depression_flag = s.matched_terms.size() >= min_hits;
    }
    return summaries;
}

inline std::vector<bool> flag_vector(const std::vector<TopicSummary>& summaries) {
    std::vector<bool> out(summaries.size());
    for (const auto& s : summaries) out.at(s.topic_id) = s.depression_flag;
    return out;
}

/// θ as a feature matrix, columns topic_0 .. topic_{K-1}.
inline FeatureMatrix doc_topic_proportions(const TopicModel& model) {
    FeatureMatrix m;
    for (std::size_t k = 0; k < model.n_topics(); ++k) m.names.push_back("topic_" + std::to_string(k));
    for (std::size_t d = 0; d < model.n_docs(); ++d) m.add_row(model.doc_ids[d], model.theta[d]);
    return m;
}

/// Document indices whose most probable topic is `topic_id`.
inline std::vector<std::size_t> topic_members(const TopicModel& model, std::size_t topic_id) {
    std::vector<std::size_t> out;
    for (std::size_t d = 0; d < model.n_docs(); ++d)
        if (model.argmax_topic(d) == topic_id) out.push_back(d);
    return out;
}

/// Mean of the feature rows of the topic's member documents. Rows are looked
/// up by the model's document ids.
inline FeatureVector topic_feature_vector(const TopicModel& model, std::size_t topic_id,
                                          const FeatureMatrix& doc_features) {
    if (topic_id >= model.n_topics()) throw ValidationError("topic id out of range");
    std::unordered_map<std::string, std::size_t> row_of;
    for (std::size_t i = 0; i < doc_features.n_rows(); ++i) row_of[doc_features.instance_ids[i]] = i;
    FeatureVector v{doc_features.names, std::vector<double>(doc_features.n_cols(), 0.0)};
    std::size_t n = 0;
    for (auto d : topic_members(model, topic_id)) {
        const auto it = row_of.find(model.doc_ids[d]);
        if (it == row_of.end())
            throw ValidationError("no feature row for document '" + model.doc_ids[d] + "'");
        const auto& row = doc_features.rows[it->second];
        for (std::size_t c = 0; c < row.size(); ++c) v.values[c] += row[c];
        ++n;
    }
    if (n == 0) throw ValidationError("topic " + std::to_string(topic_id) + " has no member documents");
    for (auto& x : v.values) x /= static_cast<double>(n);
    return v;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

inline nlohmann::ordered_json topic_model_to_json(const TopicModel& m) {
    nlohmann::ordered_json j;
    j["type"] = "lda";
    j["K"] = m.n_topics();
    j["alpha"] = m.params.alpha;
    j["beta"] = m.params.beta;
    j["iterations"] = m.params.iterations;
    j["seed"] = m.params.seed;
    j["vocab"] = m.vocab;
    j["doc_ids"] = m.doc_ids;
    std::vector<double> phi, theta;
    for (const auto& r : m.phi) phi.insert(phi.end(), r.begin(), r.end());
    for (const auto& r : m.theta) theta.insert(theta.end(), r.begin(), r.end());
    j["phi"] = phi;
    j["theta"] = theta;
    return j;
}

inline TopicModel topic_model_from_json(const nlohmann::json& j) {
    try {
        TopicModel m;
        m.params.n_topics = j.at("K").get<std::size_t>();
        m.params.alpha = j.at("alpha").get<double>();
        m.params.beta = j.at("beta").get<double>();
        m.params.iterations = j.at("iterations").get<std::size_t>();
        m.params.seed = j.at("seed").get<std::uint64_t>();
        m.vocab = j.at("vocab").get<std::vector<std::string>>();
        m.doc_ids = j.at("doc_ids").get<std::vector<std::string>>();
        const auto phi = j.at("phi").get<std::vector<double>>();
        const auto theta = j.at("theta").get<std::vector<double>>();
        const std::size_t K = m.params.n_topics, V = m.vocab.size(), D = m.doc_ids.size();
        if (phi.size() != K * V || theta.size() != D * K) throw ValidationError("topic model JSON: matrix size mismatch");
        for (std::size_t k = 0; k < K; ++k) m.phi.emplace_back(phi.begin() + k * V, phi.begin() + (k + 1) * V);
        for (std::size_t d = 0; d < D; ++d) m.theta.emplace_back(theta.begin() + d * K, theta.begin() + (d + 1) * K);
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("topic model JSON: ") + e.what());
    }
}

inline void write_topic_summaries_csv(const std::vector<TopicSummary>& summaries, std::ostream& out) {
    out << "topic_id,rank,word,probability,flagged\n";
    for (const auto& s : summaries)
        for (std::size_t r = 0; r < s.top_words.size(); ++r)
            out << s.topic_id << ',' << r + 1 << ',' << csv_escape(s.top_words[r].first) << ','
                << format_double(s.top_words[r].second) << ',' << (s.depression_flag ? 1 : 0) << '\n';
}

}  // namespace depsig
