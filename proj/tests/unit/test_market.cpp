#include "tlmp/market.hpp"

#include <gtest/gtest.h>

#include <algorithm>

using namespace tlmp;

namespace {

EsrSpec case_study_esr() {
    EsrSpec e;
    e.name = "ESR1";
    e.discharge_cap = e.charge_cap = 3.0;
    e.soc_max = 10.0;
    e.soc_initial = 4.0;
    e.discharge_cost = 9.9;
    e.charge_cost = 5.3;
    return e;
}

GeneratorSpec generator(double cost) {
    GeneratorSpec g;
    g.name = "G";
    g.capacity_max = 100.0;
    g.ramp_up = g.ramp_down = 10.0;
    g.marginal_cost = cost;
    g.initial_output = 50.0;
    return g;
}

bool mentions(const std::vector<Violation>& v, const std::string& text) {
    return std::any_of(v.begin(), v.end(), [&](const Violation& x) { return x.message.find(text) != std::string::npos; });
}

}  // namespace

TEST(Validate, CaseStudyEsrIsValid) {
    Market m;
    m.esrs.push_back(case_study_esr());
    m.generators.push_back(generator(25.0));
    EXPECT_TRUE(validate(m).empty());
}

TEST(Validate, ReversedRelaxationInequality) {
    Market m;
    auto e = case_study_esr();
    e.discharge_cost = 1.0;
    e.charge_cost = 5.0;
    m.esrs.push_back(e);
    const auto v = validate(m);
    ASSERT_FALSE(v.empty());
    EXPECT_TRUE(mentions(v, "relaxation assumption"));
}

TEST(Validate, ZeroRamp) {
    Market m;
    auto g = generator(25.0);
    g.ramp_up = 0.0;
    m.generators.push_back(g);
    const auto v = validate(m);
    ASSERT_FALSE(v.empty());
    EXPECT_TRUE(mentions(v, "ramp must be positive"));
    EXPECT_EQ(v.front().field.rfind("generators[0]", 0), 0u);
}

TEST(Validate, ReportsEveryViolation) {
    Market m;
    m.config.window = 0;
    auto g = generator(25.0);
    g.capacity_min = 200.0;
    m.generators.push_back(g);
    auto e = case_study_esr();
    e.soc_initial = 20.0;
    m.esrs.push_back(e);
    EXPECT_GE(validate(m).size(), 3u);
}

TEST(Validate, BidsChecked) {
    Market m;
    m.config.horizon = 2;
    m.esrs.push_back(case_study_esr());
    auto bids = truthful_bids(m);
    EXPECT_TRUE(validate(bids, m).empty());
    bids.charge[0][1] = 20.0;  // above the discharge bid
    EXPECT_TRUE(mentions(validate(bids, m), "relaxation assumption"));
    bids.discharge[0].pop_back();
    EXPECT_FALSE(validate(bids, m).empty());
}

TEST(BidCost, Linear) {
    EXPECT_DOUBLE_EQ(bid_cost(25.0, 10.0), 250.0);
    EXPECT_DOUBLE_EQ(bid_cost(9.9, 0.0), 0.0);
    EXPECT_DOUBLE_EQ(bid_cost(5.3, 2.5), 13.25);
    EXPECT_THROW(bid_cost(5.3, -1.0), NegativeQuantity);
}

TEST(TruthfulBids, CopiesTrueCosts) {
    const std::vector<EsrSpec> esrs{case_study_esr()};
    const std::vector<GeneratorSpec> gens{generator(30.0)};
    const auto b = truthful_bids(gens, esrs, 24);
    ASSERT_EQ(b.discharge.size(), 1u);
    for (std::size_t t = 0; t < 24; ++t) {
        EXPECT_EQ(b.discharge[0][t], 9.9);
        EXPECT_EQ(b.charge[0][t], 5.3);
        EXPECT_EQ(b.generator[0][t], 30.0);
    }
    EXPECT_TRUE(truthful_bids({}, {}, 24).empty());
}

TEST(ShiftBid, OneSideOneParticipant) {
    const std::vector<EsrSpec> esrs{case_study_esr(), case_study_esr()};
    const auto b = truthful_bids({}, esrs, 3);
    const auto s = shift_bid(b, BidSide::Charge, 1, -0.01);
    EXPECT_EQ(s.charge[0], b.charge[0]);
    EXPECT_EQ(s.discharge, b.discharge);
    for (double c : s.charge[1]) EXPECT_DOUBLE_EQ(c, 5.29);
}

TEST(Participants, OrderAndNames) {
    Market m;
    m.generators.push_back(generator(1.0));
    m.esrs.push_back(case_study_esr());
    const auto p = participants(m);
    ASSERT_EQ(p.size(), 2u);
    EXPECT_EQ(p[0].kind, ParticipantKind::Generator);
    EXPECT_EQ(participant_name(m, p[1]), "ESR1");
}
