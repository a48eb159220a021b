// Generated by tools/gen_stroke_font.py. Do not edit.
//
// Glyph outlines derived from the Hershey simplex roman, simplex greek and
// math-symbol tables (public domain, A. V. Hershey, U.S. National Bureau of
// Standards). Each record is in Hershey vertex encoding: a left/right bound
// pair followed by coordinate pairs offset from 'R'; " R" lifts the pen.

#include "mathseed/stroke_font.hpp"

namespace mathseed::detail {

const std::vector<HersheyRecord>& hershey_records() {
  static const std::vector<HersheyRecord> records = {
      {" ", R"hf(JZ)hf"},
      {"!", R"hf(MWRFRT RRYQZR[SZRY)hf"},
      {"\"", R"hf(JZNFNM RVFVM)hf"},
      {"#", R"hf(H]SBLb RYBRb RLOZO RKUYU)hf"},
      {"$", R"hf(H\PBP_ RTBT_ RYIWGTFPFMGKIKKLMMNOOUQWRXSYUYXWZT[P[MZKX)hf"},
      {"%", R"hf(F^[FI[ RNFPHPJOLMMKMIKIIJGLFNFPGSHVHYG[F RWTUUTWTYV[X[ZZ[X[VYTWT)hf"},
      {"&", R"hf(E_\O\N[MZMYNXPVUTXRZP[L[JZIYHWHUISJRQNRMSKSIRGPFNGMIMKNNPQUXWZY[[[\Z\Y)hf"},
      {"'", R"hf(MWRHQGRFSGSIRKQL)hf"},
      {"(", R"hf(KYVBTDRGPKOPOTPYR]T`Vb)hf"},
      {")", R"hf(KYNBPDRGTKUPUTTYR]P`Nb)hf"},
      {"*", R"hf(JZRLRX RMOWU RWOMU)hf"},
      {"+", R"hf(E_RIR[ RIR[R)hf"},
      {",", R"hf(NVSZR[QZRYSZS\Q^)hf"},
      {"-", R"hf(E_IR[R)hf"},
      {".", R"hf(NVRYQZR[SZRY)hf"},
      {"/", R"hf(G][BIb)hf"},
      {"0", R"hf(H\QFNGLJKOKRLWNZQ[S[VZXWYRYOXJVGSFQF)hf"},
      {"1", R"hf(H\NJPISFS[)hf"},
      {"2", R"hf(H\LKLJMHNGPFTFVGWHXJXLWNUQK[Y[)hf"},
      {"3", R"hf(H\MFXFRNUNWOXPYSYUXXVZS[P[MZLYKW)hf"},
      {"4", R"hf(H\UFKTZT RUFU[)hf"},
      {"5", R"hf(H\WFMFLOMNPMSMVNXPYSYUXXVZS[P[MZLYKW)hf"},
      {"6", R"hf(H\XIWGTFRFOGMJLOLTMXOZR[S[VZXXYUYTXQVOSNRNOOMQLT)hf"},
      {"7", R"hf(H\YFO[ RKFYF)hf"},
      {"8", R"hf(H\PFMGLILKMMONSOVPXRYTYWXYWZT[P[MZLYKWKTLRNPQOUNWMXKXIWGTFPF)hf"},
      {"9", R"hf(H\XMWPURRSQSNRLPKMKLLINGQFRFUGWIXMXRWWUZR[P[MZLX)hf"},
      {":", R"hf(NVROQPRQSPRO RRVQWRXSWRV)hf"},
      {";", R"hf(NVROQPRQSPRO RSWRXQWRVSWSYQ[)hf"},
      {"<", R"hf(F^ZIJRZ[)hf"},
      {"=", R"hf(E_IO[O RIU[U)hf"},
      {">", R"hf(F^JIZRJ[)hf"},
      {"?", R"hf(I[LKLJMHNGPFTFVGWHXJXLWNVORQRT RRYQZR[SZRY)hf"},
      {"@", R"hf(E`WNVLTKQKOLNMMPMSNUPVSVUUVS RQKOMNPNSOUPV RWKVSVUXVZV\T]Q]O\L[JYHWGTFQFNGLHJJILHOHRIUJWLYNZQ[T[WZYYZX RXKWSWUXV)hf"},
      {"A", R"hf(I[RFJ[ RRFZ[ RMTWT)hf"},
      {"B", R"hf(G\KFK[ RKFTFWGXHYJYLXNWOTP RKPTPWQXRYTYWXYWZT[K[)hf"},
      {"C", R"hf(H]ZKYIWGUFQFOGMILKKNKSLVMXOZQ[U[WZYXZV)hf"},
      {"D", R"hf(G\KFK[ RKFRFUGWIXKYNYSXVWXUZR[K[)hf"},
      {"E", R"hf(H[LFL[ RLFYF RLPTP RL[Y[)hf"},
      {"F", R"hf(HZLFL[ RLFYF RLPTP)hf"},
      {"G", R"hf(H]ZKYIWGUFQFOGMILKKNKSLVMXOZQ[U[WZYXZVZS RUSZS)hf"},
      {"H", R"hf(G]KFK[ RYFY[ RKPYP)hf"},
      {"I", R"hf(NVRFR[)hf"},
      {"J", R"hf(JZVFVVUYTZR[P[NZMYLVLT)hf"},
      {"K", R"hf(G\KFK[ RYFKT RPOY[)hf"},
      {"L", R"hf(HYLFL[ RL[X[)hf"},
      {"M", R"hf(F^JFJ[ RJFR[ RZFR[ RZFZ[)hf"},
      {"N", R"hf(G]KFK[ RKFY[ RYFY[)hf"},
      {"O", R"hf(G]PFNGLIKKJNJSKVLXNZP[T[VZXXYVZSZNYKXIVGTFPF)hf"},
      {"P", R"hf(G\KFK[ RKFTFWGXHYJYMXOWPTQKQ)hf"},
      {"Q", R"hf(G]PFNGLIKKJNJSKVLXNZP[T[VZXXYVZSZNYKXIVGTFPF RSWY])hf"},
      {"R", R"hf(G\KFK[ RKFTFWGXHYJYLXNWOTPKP RRPY[)hf"},
      {"S", R"hf(H\YIWGTFPFMGKIKKLMMNOOUQWRXSYUYXWZT[P[MZKX)hf"},
      {"T", R"hf(JZRFR[ RKFYF)hf"},
      {"U", R"hf(G]KFKULXNZQ[S[VZXXYUYF)hf"},
      {"V", R"hf(I[JFR[ RZFR[)hf"},
      {"W", R"hf(F^HFM[ RRFM[ RRFW[ R\FW[)hf"},
      {"X", R"hf(H\KFY[ RYFK[)hf"},
      {"Y", R"hf(I[JFRPR[ RZFRP)hf"},
      {"Z", R"hf(H\YFK[ RKFYF RK[Y[)hf"},
      {"[", R"hf(KYOBOb RPBPb ROBVB RObVb)hf"},
      {"\\", R"hf(KYKFY^)hf"},
      {"]", R"hf(KYTBTb RUBUb RNBUB RNbUb)hf"},
      {"^", R"hf(JZRDJR RRDZR)hf"},
      {"_", R"hf(I[Ib[b)hf"},
      {"`", R"hf(NVSKQMQORPSORNQO)hf"},
      {"a", R"hf(I\XMX[ RXPVNTMQMONMPLSLUMXOZQ[T[VZXX)hf"},
      {"b", R"hf(H[LFL[ RLPNNPMSMUNWPXSXUWXUZS[P[NZLX)hf"},
      {"c", R"hf(I[XPVNTMQMONMPLSLUMXOZQ[T[VZXX)hf"},
      {"d", R"hf(I\XFX[ RXPVNTMQMONMPLSLUMXOZQ[T[VZXX)hf"},
      {"e", R"hf(I[LSXSXQWOVNTMQMONMPLSLUMXOZQ[T[VZXX)hf"},
      {"f", R"hf(MYWFUFSGRJR[ ROMVM)hf"},
      {"g", R"hf(I\XMX]W`VaTbQbOa RXPVNTMQMONMPLSLUMXOZQ[T[VZXX)hf"},
      {"h", R"hf(I\MFM[ RMQPNRMUMWNXQX[)hf"},
      {"i", R"hf(NVQFRGSFREQF RRMR[)hf"},
      {"j", R"hf(MWRFSGTFSERF RSMS^RaPbNb)hf"},
      {"k", R"hf(IZMFM[ RWMMW RQSX[)hf"},
      {"l", R"hf(NVRFR[)hf"},
      {"m", R"hf(CaGMG[ RGQJNLMOMQNRQR[ RRQUNWMZM\N]Q][)hf"},
      {"n", R"hf(I\MMM[ RMQPNRMUMWNXQX[)hf"},
      {"o", R"hf(I\QMONMPLSLUMXOZQ[T[VZXXYUYSXPVNTMQM)hf"},
      {"p", R"hf(H[LMLb RLPNNPMSMUNWPXSXUWXUZS[P[NZLX)hf"},
      {"q", R"hf(I\XMXb RXPVNTMQMONMPLSLUMXOZQ[T[VZXX)hf"},
      {"r", R"hf(KXOMO[ ROSPPRNTMWM)hf"},
      {"s", R"hf(J[XPWNTMQMNNMPNRPSUTWUXWXXWZT[Q[NZMX)hf"},
      {"t", R"hf(MYRFRWSZU[W[ ROMVM)hf"},
      {"u", R"hf(I\MMMWNZP[S[UZXW RXMX[)hf"},
      {"v", R"hf(JZLMR[ RXMR[)hf"},
      {"w", R"hf(G]JMN[ RRMN[ RRMV[ RZMV[)hf"},
      {"x", R"hf(J[MMX[ RXMM[)hf"},
      {"y", R"hf(JZLMR[ RXMR[P_NaLbKb)hf"},
      {"z", R"hf(J[XMM[ RMMXM RM[X[)hf"},
      {"{", R"hf(KYTBRCQDPFPHQJRKSMSOQQ RRCQEQGRISJTLTNSPORSTTVTXSZR[Q]Q_Ra RQSSUSWRYQZP\P^Q`RaTb)hf"},
      {"|", R"hf(NVRBRb)hf"},
      {"}", R"hf(KYPBRCSDTFTHSJRKQMQOSQ RRCSESGRIQJPLPNQPURQTPVPXQZR[S]S_Ra RSSQUQWRYSZT\T^S`RaPb)hf"},
      {"~", R"hf(F^IUISJPLONOPPTSVTXTZS[Q RISJQLPNPPQTTVUXUZT[Q[O)hf"},
      {"\\alpha", R"hf(H]QMONMPLRKUKXLZN[P[RZUWWTYPZM RQMSMTNUPWXXZY[Z[)hf"},
      {"\\beta", R"hf(I\UFSGQIOMNPMTLZKb RUFWFYHYKXMWNUORO RROTPVRWTWWVYUZS[Q[OZNYMV)hf"},
      {"\\gamma", R"hf(I\JPLNNMOMQNROSRSVR[ RZMYPXRR[P_Ob)hf"},
      {"\\delta", R"hf(I[TMQMONMPLSLVMYNZP[R[TZVXWUWRVOTMRKQIQGRFTFVGXI)hf"},
      {"\\epsilon", R"hf(JZWOVNTMQMONOPPRSS RSSOTMVMXNZP[S[UZWX)hf"},
      {"\\varepsilon", R"hf(JZWOVNTMQMONOPPRSS RSSOTMVMXNZP[S[UZWX)hf"},
      {"\\zeta", R"hf(JYTFRGQHQIRJUKXK RXKTMQONRMUMWNYP[S]T_TaSbQbP`)hf"},
      {"\\eta", R"hf(H\IQJOLMNMONOPNTL[ RNTPPRNTMVMXOXRWWTb)hf"},
      {"\\theta", R"hf(G\HQIOKMMMNNNPMUMXNZO[Q[SZUWVUWRXMXJWGUFSFRHRJSMUPWRZT)hf"},
      {"\\vartheta", R"hf(G\HQIOKMMMNNNPMUMXNZO[Q[SZUWVUWRXMXJWGUFSFRHRJSMUPWRZT)hf"},
      {"\\iota", R"hf(LWRMPTOXOZP[R[TYUW)hf"},
      {"\\kappa", R"hf(I[OMK[ RYNXMWMUNQROSNS RNSPTQUSZT[U[VZ)hf"},
      {"\\lambda", R"hf(JZKFMFOGPHX[ RRML[)hf"},
      {"\\mu", R"hf(H]OMIb RNQMVMYO[Q[SZUXWT RYMWTVXVZW[Y[[Y\W)hf"},
      {"\\nu", R"hf(I[LMOMNSMXL[ RYMXPWRUURXOZL[)hf"},
      {"\\xi", R"hf(JZTFRGQHQIRJUKXK RUKRLPMOOOQQSTTVT RTTPUNVMXMZO\S^T_TaRbPb)hf"},
      {"\\pi", R"hf(G]PML[ RUMVSWXX[ RIPKNNM[M)hf"},
      {"\\rho", R"hf(I[MSMVNYOZQ[S[UZWXXUXRWOVNTMRMPNNPMSIb)hf"},
      {"\\sigma", R"hf(I][MQMONMPLSLVMYNZP[R[TZVXWUWRVOUNSM)hf"},
      {"\\tau", R"hf(H\SMP[ RJPLNOMZM)hf"},
      {"\\upsilon", R"hf(H\IQJOLMNMONOPMVMYO[Q[TZVXXTYPYM)hf"},
      {"\\phi", R"hf(G]ONMOKQJTJWKYLZN[Q[TZWXYUZRZOXMVMTORSPXMb)hf"},
      {"\\varphi", R"hf(G]ONMOKQJTJWKYLZN[Q[TZWXYUZRZOXMVMTORSPXMb)hf"},
      {"\\chi", R"hf(I[KMMMOOU`WbYb RZMYOWRM]K`Jb)hf"},
      {"\\psi", R"hf(F]VFNb RGQHOJMLMMNMPLULXMZO[Q[TZVXXUZP[M)hf"},
      {"\\omega", R"hf(F]NMLNJQITIWJZK[M[OZQW RRSQWRZS[U[WZYWZTZQYNXM)hf"},
      {"\\Gamma", R"hf(HYLFL[ RLFXF)hf"},
      {"\\Delta", R"hf(I[RFJ[ RRFZ[ RJ[Z[)hf"},
      {"\\Theta", R"hf(G]PFNGLIKKJNJSKVLXNZP[T[VZXXYVZSZNYKXIVGTFPF ROPUP)hf"},
      {"\\Lambda", R"hf(I[RFJ[ RRFZ[)hf"},
      {"\\Xi", R"hf(I[KFYF ROPUP RK[Y[)hf"},
      {"\\Pi", R"hf(G]KFK[ RYFY[ RKFYF)hf"},
      {"\\Sigma", R"hf(I[KFRPK[ RKFYF RK[Y[)hf"},
      {"\\Upsilon", R"hf(I[KKKILGMFOFPGQIRMR[ RYKYIXGWFUFTGSIRM)hf"},
      {"\\Phi", R"hf(H\RFR[ RPKMLLMKOKRLTMUPVTVWUXTYRYOXMWLTKPK)hf"},
      {"\\Psi", R"hf(G]RFR[ RILJLKMLQMSNTQUSUVTWSXQYMZL[L)hf"},
      {"\\Omega", R"hf(H\K[O[LTKPKLLINGQFSFVGXIYLYPXTU[Y[)hf"},
      {"\\pm", R"hf(F^RJR[ RJRZR RJ[Z[)hf"},
      {"\\mp", R"hf(F^RJR[ RJJZJ RJRZR)hf"},
      {"\\times", R"hf(G]KKYY RYKKY)hf"},
      {"\\cdot", R"hf(PURQRRSRSQRQ)hf"},
      {"\\leq", R"hf(F^ZFJMZT RJVZV RJ[Z[)hf"},
      {"\\geq", R"hf(F^JFZMJT RJVZV RJ[Z[)hf"},
      {"\\sum", R"hf(I[KFRPK[ RKFYF RK[Y[)hf"},
      {"\\prod", R"hf(G]KFK[ RYFY[ RKFYF)hf"},
      {"\\circ", R"hf(KYQFOGNINKOMQNSNUMVKVIUGSFQF)hf"},
      {"\\div", R"hf(E_RIQJRKSJRI RIR[R RRYQZR[SZRY)hf"},
      {"\\neq", R"hf(E_IO[O RIU[U RWKMY)hf"},
      {"\\approx", R"hf(H\IRIPJMLLNLPMTPVQXQZP[N RIXIVJSLRNRPSTVVWXWZV[T)hf"},
      {"\\ldots", R"hf(F^KYJZK[LZKY RRYQZR[SZRY RYYXZY[ZZYY)hf"},
      {"\\cdots", R"hf(F^KQJRKSLRKQ RRQQRRSSRRQ RYQXRYSZRYQ)hf"},
      {"\\infty", R"hf(G][R[TYUXUVUUTTTSSRRQQPPOPNOLOKOIPIRITKULUNUOTPTQSRRSQTPUPVOXOYO[P[R)hf"},
      {"\\int", R"hf(KYXEWDVDUETGSMQ]PaOcNcMb)hf"},
      {"\\surd", R"hf(JXKSMRR[XF)hf"},
      {"\\tofu", R"hf(KYMFWFW[M[MF)hf"},
  };
  return records;
}

}  // namespace mathseed::detail
