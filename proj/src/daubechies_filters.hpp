#pragma once

#include <array>
#include <span>

namespace multithresh::detail {

// Daubechies low-pass filters with N = 2..10 vanishing moments
// (length 2N, unit l2 norm, sum sqrt(2)).

inline constexpr std::array<double, 4> daub_n2 = {
  4.82962913144534156107e-01, 8.36516303737807942476e-01,
  2.24143868042013388875e-01, -1.29409522551260369738e-01,
};

inline constexpr std::array<double, 6> daub_n3 = {
  3.32670552950082631938e-01, 8.06891509311092547385e-01,
  4.59877502118491543470e-01, -1.35011020010254584323e-01,
  -8.54412738820266581818e-02, 3.52262918857095333469e-02,
};

inline constexpr std::array<double, 8> daub_n4 = {
  2.30377813308896506328e-01, 7.14846570552915672181e-01,
  6.30880767929858921050e-01, -2.79837694168598542788e-02,
  -1.87034811719093085891e-01, 3.08413818355607639854e-02,
  3.28830116668851965556e-02, -1.05974017850690317016e-02,
};

inline constexpr std::array<double, 10> daub_n5 = {
  1.60102397974192928176e-01, 6.03829269797189649438e-01,
  7.24308528437772936037e-01, 1.38428145901320742706e-01,
  -2.42294887066382025331e-01, -3.22448695846383748265e-02,
  7.75714938400457187928e-02, -6.24149021279827437292e-03,
  -1.25807519990819988154e-02, 3.33572528547377124622e-03,
};

inline constexpr std::array<double, 12> daub_n6 = {
  1.11540743350109466947e-01, 4.94623890398453058825e-01,
  7.51133908021095364482e-01, 3.15250351709197629280e-01,
  -2.26264693965439828149e-01, -1.29766867567261939831e-01,
  9.75016055873230425011e-02, 2.75228655303057269388e-02,
  -3.15820393174860297725e-02, 5.53842201161496125623e-04,
  4.77725751094551075865e-03, -1.07730108530847959111e-03,
};

inline constexpr std::array<double, 14> daub_n7 = {
  7.78520540850091841145e-02, 3.96539319481917285071e-01,
  7.29132090846235092485e-01, 4.69782287405193121899e-01,
  -1.43906003928564979466e-01, -2.24036184993874981641e-01,
  7.13092192668302593539e-02, 8.06126091510830783404e-02,
  -3.80299369350144134128e-02, -1.65745416306668814921e-02,
  1.25509985560998404974e-02, 4.29577972921366514972e-04,
  -1.80164070404749084887e-03, 3.53713799974520240726e-04,
};

inline constexpr std::array<double, 16> daub_n8 = {
  5.44158422431040081357e-02, 3.12871590914299946284e-01,
  6.75630736297289757886e-01, 5.85354683654206731092e-01,
  -1.58291052563493059302e-02, -2.84015542961546907375e-01,
  4.72484573913282794588e-04, 1.28747426620478472303e-01,
  -1.73693010018075473522e-02, -4.40882539307947546314e-02,
  1.39810279173982823786e-02, 8.74609404740577661697e-03,
  -4.87035299345157414452e-03, -3.91740373376947049761e-04,
  6.75449406450569331435e-04, -1.17476784124769534768e-04,
};

inline constexpr std::array<double, 18> daub_n9 = {
  3.80779473638783449996e-02, 2.43834674612590340814e-01,
  6.04823123690111152939e-01, 6.57288078051300517224e-01,
  1.33197385825007563742e-01, -2.93273783279174915517e-01,
  -9.68407832229764564680e-02, 1.48540749338106375932e-01,
  3.07256814793333797586e-02, -6.76328290613299742962e-02,
  2.50947114831451972578e-04, 2.23616621236790956428e-02,
  -4.72320475775139716340e-03, -4.28150368246343025758e-03,
  1.84764688305622654628e-03, 2.30385763523195972796e-04,
  -2.51963188942710123765e-04, 3.93473203162716025764e-05,
};

inline constexpr std::array<double, 20> daub_n10 = {
  2.66700579005555542256e-02, 1.88176800077691497304e-01,
  5.27201188931725628350e-01, 6.88459039453603538483e-01,
  2.81172343660577472857e-01, -2.49846424327315380642e-01,
  -1.95946274377377049891e-01, 1.27369340335793251873e-01,
  9.30573646035723484049e-02, -7.13941471663970816941e-02,
  -2.94575368218758133765e-02, 3.32126740593410019198e-02,
  3.60655356695616970131e-03, -1.07331754833305745289e-02,
  1.39535174705290106363e-03, 1.99240529518505612994e-03,
  -6.85856694959711618576e-04, -1.16466855129285448982e-04,
  9.35886703200695919220e-05, -1.32642028945212442831e-05,
};

inline std::span<const double>
daubechies_filter(int vanishing_moments)
{
  switch (vanishing_moments) {
    case 2: return daub_n2;
    case 3: return daub_n3;
    case 4: return daub_n4;
    case 5: return daub_n5;
    case 6: return daub_n6;
    case 7: return daub_n7;
    case 8: return daub_n8;
    case 9: return daub_n9;
    case 10: return daub_n10;
    default: return {};
  }
}

} // namespace multithresh::detail
