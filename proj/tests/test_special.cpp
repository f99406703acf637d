#include <gtest/gtest.h>

#include "dbar/special.hpp"

using namespace dbar;

namespace {

struct Ref {
  cplx w, e1, scaled;
};

// Reference values computed with 30-digit arithmetic.
const Ref kRefs[] = {
    {{0.1, 0.2}, {1.0275473087791882, -0.9172354716463662}, {1.1129787013794497, 0.22561195207702445}},
    {{1.5, -0.7}, {0.04888294554255994, 0.08048191717841176}, {0.16756022119470154, -0.1411340273401205}},
    {{-1.9, 0.3}, {-4.518954813700139, -2.093824921658504}, {-0.6457060403074222, -0.19974028485897818}},
    {{3.0, 4.0}, {0.0008639539589795851, 0.008786208377197442}, {-0.011342664119813429, -0.013132777916462926}},
    {{-3.0, 0.5}, {-9.383603509330943, 0.12921297008462976}, {-0.4099908724857342, -0.22397903445218462}},
    {{-3.0, -0.5}, {-9.383603509330943, -0.12921297008462976}, {-0.4099908724857342, 0.22397903445218462}},
    {{-12.0, 1.0}, {-9175.784346642648, 11726.218149286035}, {-0.03046114585884273, -0.04744042386240136}},
    {{-30.0, 0.2}, {-362107869216.6162, 70799651975.66725}, {-0.03320925132841018, -0.006731848515998458}},
    {{-45.0, 3.0}, {7.751759908361042e+17, 1.650157249353236e+17}, {-0.021967494704834556, 0.0031313904301766685}},
    {{-80.0, -1.0}, {-3.8641260370980564e+32, -5.853652908408706e+32}, {-0.0037681618835637937, 0.005868564425212418}},
    {{0.0, 25.0}, {0.006848597179702591, -0.03931377579493529}, {0.006788348781841463, -0.0009064238224483105}},
    {{0.0, -25.0}, {0.006848597179702591, 0.03931377579493529}, {0.006788348781841463, 0.0009064238224483105}},
    {{0.5, 60.0}, {0.002838253607529573, 0.009696023929799152}, {-0.0044568061551942765, -0.0014263579772976092}},
    {{100.0, -20.0}, {8.055604974262202e-47, 3.522457529511979e-46}, {0.0008836776206295212, -0.0019769290601578133}},
    {{-5.0, 5.0}, {13.470936071475245, -18.464085049321024}, {0.025747010503489348, -0.0870381553730342}},
    {{-7.0, -2.0}, {13.778385987725015, -176.11765508892697}, {-0.005228577758613614, -0.01142465083073331}},
    {{-0.001, 0.001}, {5.982966023911784, -2.3551939900812338}, {5.9769830598811975, 0.005976985052209682}},
    {{-60.0, 30.0}, {5.3581176973411174e+23, -1.6403092122002628e+24}, {0.0007237233584071502, -0.004635687805346933}},
};

double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST(Special, E1MatchesReference) {
  for (const auto& r : kRefs) {
    EXPECT_LT(rel(special::e1(r.w), r.e1), 1e-12) << "w = " << r.w;
    EXPECT_NEAR(special::re_e1(r.w), r.e1.real(), 1e-12 * std::abs(r.e1)) << "w = " << r.w;
  }
}

TEST(Special, ScaledReE1MatchesReference) {
  for (const auto& r : kRefs) EXPECT_LT(rel(special::scaled_re_e1(r.w), r.scaled), 1e-11) << "w = " << r.w;
}

TEST(Special, RealAxisIsContinuousAcrossCut) {
  EXPECT_NEAR(special::re_e1(cplx(-0.5, 0.0)), -0.4542199048631736, 1e-14);
  EXPECT_NEAR(special::re_e1(cplx(-0.5, 1e-13)), -0.4542199048631736, 1e-12);
  EXPECT_NEAR(special::re_e1(cplx(-0.5, -1e-13)), -0.4542199048631736, 1e-12);
  EXPECT_NEAR(special::scaled_re_e1(cplx(2.0, 0.0)).real(), 0.3613286168882226, 1e-14);
}

TEST(Special, ReEiSplitsIntoLogAndEntirePart) {
  for (cplx x : {cplx(0.3, 0.4), cplx(-2.0, 1.0), cplx(5.0, -3.0), cplx(-8.0, -0.1)}) {
    const double lhs = special::re_ei(x);
    const double rhs = euler_gamma + std::log(std::abs(x)) + special::re_ein(x);
    EXPECT_NEAR(lhs, rhs, 1e-11 * (1.0 + std::abs(lhs))) << x;
  }
}
